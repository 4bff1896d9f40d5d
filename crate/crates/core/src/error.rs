use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::cycles::WitnessCycle;
use crate::graph::ArcKind;
use crate::model::ModelError;

/// Errors raised by the analyses.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("shift components must be finite and non-negative, got ({c_ef}, {c_ic})")]
    NegativeShift { c_ef: f64, c_ic: f64 },
    #[error("graph has a negative cycle of weight {}", .0.total_weight)]
    NegativeCycle(WitnessCycle),
    #[error("no finite {axis} shift removes every negative cycle: a cycle of weight {} has no {axis} arc", .witness.total_weight)]
    InfeasibleAxis {
        axis: ArcKind,
        witness: WitnessCycle,
    },
    #[error("payment table covers {found} vertices, graph has {expected}")]
    PaymentTableSize { expected: usize, found: usize },
    #[error("local efficiency check enumerates m! permutations; {agents} agents exceeds the limit of {limit}")]
    TooManyAgents { agents: usize, limit: usize },
    #[error("cycle length bound must be at least 2, got {0}")]
    CycleBoundTooSmall(usize),
    #[error("partition hypothesis fails: a negative cycle uses only {kind} arcs")]
    PurelyOneKindCycle {
        kind: ArcKind,
        witness: WitnessCycle,
    },
    #[error("pruned graph still has a negative cycle of weight {}; the trusted/untrusted pruning argument does not hold here", .0.total_weight)]
    PrunedGraphNegativeCycle(WitnessCycle),
    #[error("invalid trust partition: {0}")]
    InvalidPartition(String),
    #[error("invalid example parameters: {0}")]
    ExampleParameters(String),
    #[error(
        "allocation at profile {profile:?} is not welfare-maximizing over the candidate outcomes"
    )]
    NotWelfareMaximizing { profile: Vec<usize> },
    #[error("candidate outcome list is empty or malformed: {0}")]
    BadCandidates(String),
}
