//! Payment existence and synthesis for finite, tabulated allocation functions.
//!
//! An [`Instance`] lists the agents' finite type spaces (valuations over opaque
//! bundle ids) and an allocation table over the full profile product. From it we
//! build the constraint digraph ([`ConstraintGraph`]) whose vertices are
//! `(agent, profile)` pairs and whose arcs encode the envy-freeness (EF) and
//! incentive-compatibility (IC) inequalities on payments. Everything else is
//! shortest paths on that graph:
//!
//! * [`cycles`] decides EF-, IC- and joint implementability by negative-cycle
//!   search and extracts witness cycles; brute-force checks of local efficiency
//!   and cycle monotonicity are kept alongside as independent oracles.
//! * [`payments`] turns shortest-path distances into payments and measures
//!   exact or approximate constraint violations.
//! * [`tradeoff`] computes the frontier of minimal `(c_ef, c_ic)` shifts that
//!   remove all negative cycles.
//! * [`partition`] prunes the graph for a trusted/untrusted agent split.
//! * [`fixtures`] generates the standard single-good examples.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod cycles;
pub mod fixtures;
pub mod graph;
pub mod model;
pub mod partition;
pub mod payments;
pub mod tradeoff;

mod error;

pub use cycles::{
    classify, cycle_monotonicity_check, find_negative_cycle, local_efficiency_check, ArcFilter,
    ImplementabilityReport, WitnessCycle,
};
pub use error::Error;
pub use graph::{build_graph, shift_graph, Arc, ArcKind, ConstraintGraph, Vertex, VertexId};
pub use model::{
    Instance, InstanceParts, ModelError, Profile, ProfileSpace, TypeSpec, ValuationType,
    DEFAULT_TOLERANCE,
};
pub use partition::{partition_payments, prune_graph, PartitionOutcome, TrustPartition};
pub use payments::{
    compute_payments, verify_on_graph, verify_payments, PaymentTable, ViolationReport,
};
pub use tradeoff::{
    approx_payments, is_cycle_correcting, min_shift_one_sided, pareto_frontier, Frontier,
    FrontierVertex,
};
