//! Payments as shortest-path potentials, and their verification.

use alloc::vec::Vec;

use crate::cycles::{label_correcting, ArcFilter, Search};
use crate::error::Error;
use crate::graph::{build_graph, Arc, ArcKind, ConstraintGraph, VertexId};
use crate::model::Instance;

/// One payment per `(agent, profile)` vertex, indexed like [`VertexId`].
/// Positive values are paid by the agent to the mechanism.
#[derive(Debug, Clone, PartialEq)]
pub struct PaymentTable {
    num_agents: usize,
    values: Vec<f64>,
}

impl PaymentTable {
    pub fn new(num_agents: usize, values: Vec<f64>) -> Self {
        Self { num_agents, values }
    }

    pub fn from_fn(g: &ConstraintGraph, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let m = g.num_agents();
        let values = (0..g.vertex_count()).map(|k| f(k % m, k / m)).collect();
        Self::new(m, values)
    }

    pub fn num_agents(&self) -> usize {
        self.num_agents
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, v: VertexId) -> f64 {
        self.values[v.0]
    }

    /// Payment of `agent` at the profile of rank `rank`.
    pub fn at(&self, agent: usize, rank: usize) -> f64 {
        self.values[rank * self.num_agents + agent]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Adds `c` to every payment.
    pub fn translated(&self, c: f64) -> Self {
        Self::new(self.num_agents, self.values.iter().map(|p| p + c).collect())
    }
}

/// Largest amount by which payments break the EF and IC inequalities.
///
/// `max_ef_violation` is the smallest `Delta` for which the mechanism is
/// `Delta`-approximately envy-free; likewise for IC.
#[derive(Debug, Clone, PartialEq)]
pub struct ViolationReport {
    pub max_ef_violation: f64,
    pub max_ic_violation: f64,
    pub worst_ef_arc: Option<Arc>,
    pub worst_ic_arc: Option<Arc>,
}

impl ViolationReport {
    pub fn is_envy_free(&self, tolerance: f64) -> bool {
        self.max_ef_violation <= tolerance
    }

    pub fn is_incentive_compatible(&self, tolerance: f64) -> bool {
        self.max_ic_violation <= tolerance
    }
}

/// Shortest-path distances from a virtual source joined to every vertex by a
/// zero-weight arc. All payments are therefore `<= 0`.
pub fn compute_payments(g: &ConstraintGraph) -> Result<PaymentTable, Error> {
    match label_correcting(g, ArcFilter::All) {
        Search::Settled(dist) => Ok(PaymentTable::new(g.num_agents(), dist)),
        Search::Negative(cycle) => Err(Error::NegativeCycle(cycle)),
    }
}

/// Checks payments against the unshifted graph of `inst`.
pub fn verify_payments(inst: &Instance, p: &PaymentTable) -> Result<ViolationReport, Error> {
    verify_on_graph(&build_graph(inst), p)
}

/// Checks `p_head - p_tail <= weight` on every arc of `g` as it stands
/// (shifted or pruned graphs are measured against their own arcs).
pub fn verify_on_graph(g: &ConstraintGraph, p: &PaymentTable) -> Result<ViolationReport, Error> {
    if p.len() != g.vertex_count() {
        return Err(Error::PaymentTableSize {
            expected: g.vertex_count(),
            found: p.len(),
        });
    }
    let mut report = ViolationReport {
        max_ef_violation: 0.0,
        max_ic_violation: 0.0,
        worst_ef_arc: None,
        worst_ic_arc: None,
    };
    for arc in g.arcs() {
        let excess = p.get(arc.head) - p.get(arc.tail) - arc.weight;
        let (max, worst) = match arc.kind {
            ArcKind::Ef => (&mut report.max_ef_violation, &mut report.worst_ef_arc),
            ArcKind::Ic => (&mut report.max_ic_violation, &mut report.worst_ic_arc),
        };
        if excess > *max {
            *max = excess;
            *worst = Some(*arc);
        }
    }
    Ok(report)
}
