//! The constraint digraph over `(agent, profile)` vertices.
//!
//! An EF arc `(j, v) -> (i, v)` carries `v_i(a_i(v)) - v_i(a_j(v))`: payments
//! must satisfy `p_i(v) <= p_j(v) + w`. An IC arc `(i, (t', v_-i)) -> (i, (t, v_-i))`
//! carries `v_i^t(a_i(t, v_-i)) - v_i^t(a_i(t', v_-i))`, i.e. agent `i` with true
//! type `t` gains nothing by reporting `t'`. Both are difference constraints
//! `p_head - p_tail <= w`, so feasibility is the absence of negative cycles.
//!
//! Self-arcs (`i = j`, `t = t'`) have weight zero and are not stored.

use alloc::vec::Vec;
use core::fmt;

use crate::error::Error;
use crate::model::{Instance, Profile, ProfileSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ArcKind {
    Ef,
    Ic,
}

impl fmt::Display for ArcKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArcKind::Ef => "EF",
            ArcKind::Ic => "IC",
        })
    }
}

/// Dense vertex index: `profile_rank * m + agent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub agent: usize,
    pub profile: Profile,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub tail: VertexId,
    pub head: VertexId,
    /// Effective weight, including the graph's shift for this arc's kind.
    pub weight: f64,
    pub kind: ArcKind,
}

/// The graph `G_a`, possibly shifted by `(c_ef, c_ic)` and possibly pruned.
///
/// Arcs are stored EF first (grouped by profile), then IC (grouped by agent,
/// then by the other agents' types). Filters and pruning preserve that order.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintGraph {
    num_agents: usize,
    space: ProfileSpace,
    arcs: Vec<Arc>,
    base_weights: Vec<f64>,
    shift: (f64, f64),
    tolerance: f64,
}

pub fn build_graph(inst: &Instance) -> ConstraintGraph {
    let m = inst.num_agents();
    let space = inst.profile_space().clone();
    let vid = |rank: usize, agent: usize| VertexId(rank * m + agent);
    let mut arcs = Vec::with_capacity(ef_arc_count(&space) + ic_arc_count(&space));

    for rank in 0..space.len() {
        for j in 0..m {
            for i in (0..m).filter(|&i| i != j) {
                let weight = inst.value_of_share(rank, i, i) - inst.value_of_share(rank, i, j);
                arcs.push(Arc {
                    tail: vid(rank, j),
                    head: vid(rank, i),
                    weight,
                    kind: ArcKind::Ef,
                });
            }
        }
    }

    for i in 0..m {
        let n_types = space.sizes()[i];
        // One component per assignment of the other agents: ranks with coordinate i = 0.
        for base in (0..space.len()).filter(|&r| space.coordinate(r, i) == 0) {
            for lie in 0..n_types {
                let tail_rank = space.with_coordinate(base, i, lie);
                for truth in (0..n_types).filter(|&t| t != lie) {
                    let head_rank = space.with_coordinate(base, i, truth);
                    let weight = inst.value(i, truth, inst.assigned(head_rank, i))
                        - inst.value(i, truth, inst.assigned(tail_rank, i));
                    arcs.push(Arc {
                        tail: vid(tail_rank, i),
                        head: vid(head_rank, i),
                        weight,
                        kind: ArcKind::Ic,
                    });
                }
            }
        }
    }

    let base_weights = arcs.iter().map(|a| a.weight).collect();
    ConstraintGraph {
        num_agents: m,
        space,
        arcs,
        base_weights,
        shift: (0.0, 0.0),
        tolerance: inst.tolerance(),
    }
}

/// Returns `g` with `c_ef` added to every EF arc and `c_ic` to every IC arc.
///
/// Shifts accumulate: the result's shift is `g.shift() + (c_ef, c_ic)`.
pub fn shift_graph(g: &ConstraintGraph, c_ef: f64, c_ic: f64) -> Result<ConstraintGraph, Error> {
    if !(c_ef >= 0.0 && c_ic >= 0.0 && c_ef.is_finite() && c_ic.is_finite()) {
        return Err(Error::NegativeShift { c_ef, c_ic });
    }
    let mut out = g.clone();
    out.shift = (g.shift.0 + c_ef, g.shift.1 + c_ic);
    out.reweight();
    Ok(out)
}

/// `(prod_i |T_i|) * m * (m - 1)`.
pub fn ef_arc_count(space: &ProfileSpace) -> usize {
    let m = space.sizes().len();
    space.len() * m * m.saturating_sub(1)
}

/// `sum_i (prod_{j != i} |T_j|) * |T_i| * (|T_i| - 1)`.
pub fn ic_arc_count(space: &ProfileSpace) -> usize {
    space
        .sizes()
        .iter()
        .map(|&t| (space.len() / t) * t * (t - 1))
        .sum()
}

impl ConstraintGraph {
    fn reweight(&mut self) {
        let (c_ef, c_ic) = self.shift;
        for (arc, &base) in self.arcs.iter_mut().zip(&self.base_weights) {
            arc.weight = base
                + match arc.kind {
                    ArcKind::Ef => c_ef,
                    ArcKind::Ic => c_ic,
                };
        }
    }

    pub fn num_agents(&self) -> usize {
        self.num_agents
    }

    pub fn profile_space(&self) -> &ProfileSpace {
        &self.space
    }

    pub fn vertex_count(&self) -> usize {
        self.space.len() * self.num_agents
    }

    pub fn vertex(&self, id: VertexId) -> Vertex {
        Vertex {
            agent: id.0 % self.num_agents,
            profile: self.space.unrank(id.0 / self.num_agents),
        }
    }

    pub fn vertex_id(&self, agent: usize, profile: &[usize]) -> Option<VertexId> {
        if agent >= self.num_agents {
            return None;
        }
        self.space
            .rank(profile)
            .map(|r| VertexId(r * self.num_agents + agent))
    }

    pub fn agent_of(&self, id: VertexId) -> usize {
        id.0 % self.num_agents
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// Unshifted weight of the arc at position `index` in [`Self::arcs`].
    pub fn base_weight(&self, index: usize) -> f64 {
        self.base_weights[index]
    }

    pub fn arcs_of(&self, kind: ArcKind) -> impl Iterator<Item = &Arc> + '_ {
        self.arcs.iter().filter(move |a| a.kind == kind)
    }

    pub fn count_of(&self, kind: ArcKind) -> usize {
        self.arcs_of(kind).count()
    }

    pub fn shift(&self) -> (f64, f64) {
        self.shift
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Largest absolute effective arc weight, 0 for an arcless graph.
    pub fn max_abs_weight(&self) -> f64 {
        self.arcs.iter().fold(0.0, |acc, a| acc.max(a.weight.abs()))
    }

    /// Keeps the arcs for which `keep` holds, preserving order and shift.
    pub(crate) fn retain_arcs(&self, mut keep: impl FnMut(&Arc) -> bool) -> ConstraintGraph {
        let (arcs, base_weights) = self
            .arcs
            .iter()
            .zip(&self.base_weights)
            .filter(|(a, _)| keep(a))
            .map(|(a, &b)| (*a, b))
            .unzip();
        ConstraintGraph {
            num_agents: self.num_agents,
            space: self.space.clone(),
            arcs,
            base_weights,
            shift: self.shift,
            tolerance: self.tolerance,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{gen_example, ExampleId};

    #[test]
    fn dictator_graph_shape() {
        let inst = gen_example(&ExampleId::claim1_default()).unwrap();
        let g = build_graph(&inst);
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.count_of(ArcKind::Ef), 2);
        assert_eq!(g.count_of(ArcKind::Ic), 0);
        // Agent 0 holds the item (z = 1), agent 1 values it at 2.
        let into_1 = g
            .arcs()
            .iter()
            .find(|a| a.tail == VertexId(0) && a.head == VertexId(1))
            .unwrap();
        assert_eq!(into_1.weight, -2.0);
        let into_0 = g
            .arcs()
            .iter()
            .find(|a| a.tail == VertexId(1) && a.head == VertexId(0))
            .unwrap();
        assert_eq!(into_0.weight, 1.0);
    }

    #[test]
    fn eight_cycle_graph_counts() {
        let inst = gen_example(&ExampleId::claim3_default()).unwrap();
        let g = build_graph(&inst);
        assert_eq!(g.vertex_count(), 12);
        assert_eq!(g.count_of(ArcKind::Ef), 24);
        assert_eq!(g.count_of(ArcKind::Ic), 8);
        assert_eq!(ef_arc_count(g.profile_space()), 24);
        assert_eq!(ic_arc_count(g.profile_space()), 8);
    }

    #[test]
    fn shift_adds_per_kind_and_rejects_negative() {
        let inst = gen_example(&ExampleId::claim3_default()).unwrap();
        let g = build_graph(&inst);
        assert_eq!(shift_graph(&g, 0.0, 0.0).unwrap().arcs(), g.arcs());
        let s = shift_graph(&g, 0.25, 0.5).unwrap();
        for (a, b) in g.arcs().iter().zip(s.arcs()) {
            let c = if a.kind == ArcKind::Ef { 0.25 } else { 0.5 };
            assert_eq!(b.weight, a.weight + c);
        }
        assert_eq!(s.shift(), (0.25, 0.5));
        // The input is untouched.
        assert_eq!(g.shift(), (0.0, 0.0));
        assert!(matches!(
            shift_graph(&g, -0.1, 0.0),
            Err(Error::NegativeShift { .. })
        ));
        assert!(shift_graph(&g, 0.0, f64::NAN).is_err());
    }

    #[test]
    fn vertex_ids_round_trip() {
        let inst = gen_example(&ExampleId::claim3_default()).unwrap();
        let g = build_graph(&inst);
        for k in 0..g.vertex_count() {
            let v = g.vertex(VertexId(k));
            assert_eq!(g.vertex_id(v.agent, &v.profile), Some(VertexId(k)));
        }
        assert_eq!(g.vertex_id(3, &[0, 0, 0]), None);
    }
}
