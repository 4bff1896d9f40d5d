//! Envy-freeness for trusted agents, truthfulness for the rest.
//!
//! IC arcs entering a trusted agent's vertices and EF arcs entering an
//! untrusted agent's vertices are dropped. IC arcs stay within one agent, and
//! no surviving EF arc enters an untrusted vertex, so any surviving cycle
//! either stays among trusted vertices (EF arcs only) or among untrusted ones
//! (IC arcs only). If neither arc class alone has a negative cycle, the pruned
//! graph has none and its potentials are payments.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use crate::cycles::{find_negative_cycle, ArcFilter};
use crate::error::Error;
use crate::graph::{build_graph, ArcKind, ConstraintGraph};
use crate::model::Instance;
use crate::payments::{compute_payments, verify_on_graph, PaymentTable, ViolationReport};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrustPartition {
    trusted: BTreeSet<usize>,
    num_agents: usize,
}

impl TrustPartition {
    pub fn new(num_agents: usize, trusted: impl IntoIterator<Item = usize>) -> Result<Self, Error> {
        let trusted: BTreeSet<usize> = trusted.into_iter().collect();
        if let Some(&bad) = trusted.iter().find(|&&i| i >= num_agents) {
            return Err(Error::InvalidPartition(format!(
                "agent {bad} out of range for {num_agents} agents"
            )));
        }
        Ok(Self {
            trusted,
            num_agents,
        })
    }

    /// Every subset of `0..num_agents` as trusted set, ordered by bitmask.
    pub fn all(num_agents: usize) -> impl Iterator<Item = TrustPartition> {
        assert!(num_agents < usize::BITS as usize);
        (0..1usize << num_agents).map(move |mask| TrustPartition {
            trusted: (0..num_agents).filter(|i| mask >> i & 1 == 1).collect(),
            num_agents,
        })
    }

    pub fn is_trusted(&self, agent: usize) -> bool {
        self.trusted.contains(&agent)
    }

    pub fn trusted(&self) -> Vec<usize> {
        self.trusted.iter().copied().collect()
    }

    pub fn untrusted(&self) -> Vec<usize> {
        (0..self.num_agents)
            .filter(|i| !self.is_trusted(*i))
            .collect()
    }

    pub fn num_agents(&self) -> usize {
        self.num_agents
    }
}

pub fn prune_graph(g: &ConstraintGraph, part: &TrustPartition) -> ConstraintGraph {
    g.retain_arcs(|a| {
        let trusted = part.is_trusted(g.agent_of(a.head));
        match a.kind {
            ArcKind::Ic => !trusted,
            ArcKind::Ef => trusted,
        }
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionOutcome {
    pub payments: PaymentTable,
    /// Violations over the arcs kept by pruning; the guaranteed scope.
    pub surviving: ViolationReport,
    /// Violations over every arc of the unpruned graph; informational.
    pub all_arcs: ViolationReport,
}

pub fn partition_payments(
    inst: &Instance,
    part: &TrustPartition,
) -> Result<PartitionOutcome, Error> {
    if part.num_agents() != inst.num_agents() {
        return Err(Error::InvalidPartition(format!(
            "partition is over {} agents, instance has {}",
            part.num_agents(),
            inst.num_agents()
        )));
    }
    let g = build_graph(inst);
    for (filter, kind) in [
        (ArcFilter::EfOnly, ArcKind::Ef),
        (ArcFilter::IcOnly, ArcKind::Ic),
    ] {
        if let Some(witness) = find_negative_cycle(&g, filter) {
            return Err(Error::PurelyOneKindCycle { kind, witness });
        }
    }
    let pruned = prune_graph(&g, part);
    let payments = match compute_payments(&pruned) {
        Ok(p) => p,
        Err(Error::NegativeCycle(c)) => return Err(Error::PrunedGraphNegativeCycle(c)),
        Err(e) => return Err(e),
    };
    Ok(PartitionOutcome {
        surviving: verify_on_graph(&pruned, &payments)?,
        all_arcs: verify_on_graph(&g, &payments)?,
        payments,
    })
}
