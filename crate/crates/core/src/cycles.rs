//! Negative-cycle search on the constraint graph and the implementability tests
//! built on it.
//!
//! The search is Bellman-Ford from a virtual source joined to every vertex by a
//! zero-weight arc, so every component is covered in one run. A relaxation is
//! only taken when it improves a label by more than the graph tolerance `tol`.
//! Two facts follow:
//!
//! * any cycle closed in the predecessor graph has weight `< -tol`, so every
//!   returned witness is negative beyond noise;
//! * when the search settles, the labels satisfy `d[head] <= d[tail] + w + tol`
//!   on every admitted arc, so they are payments violating no constraint by
//!   more than `tol`.
//!
//! Cycles of weight in `[-tol, 0)` are treated as zero.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::graph::{build_graph, Arc, ArcKind, ConstraintGraph};
use crate::model::{Instance, Profile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArcFilter {
    EfOnly,
    IcOnly,
    All,
}

impl ArcFilter {
    pub fn admits(self, kind: ArcKind) -> bool {
        match self {
            ArcFilter::EfOnly => kind == ArcKind::Ef,
            ArcFilter::IcOnly => kind == ArcKind::Ic,
            ArcFilter::All => true,
        }
    }
}

/// A closed walk of arcs: `arcs[k].head == arcs[k + 1].tail`, cyclically.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessCycle {
    pub arcs: Vec<Arc>,
    pub total_weight: f64,
    pub n_ef: usize,
    pub n_ic: usize,
}

impl WitnessCycle {
    pub fn from_arcs(arcs: Vec<Arc>) -> Self {
        let total_weight = arcs.iter().map(|a| a.weight).sum();
        let n_ef = arcs.iter().filter(|a| a.kind == ArcKind::Ef).count();
        Self {
            n_ic: arcs.len() - n_ef,
            arcs,
            total_weight,
            n_ef,
        }
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        let n = self.arcs.len();
        n > 0 && (0..n).all(|k| self.arcs[k].head == self.arcs[(k + 1) % n].tail)
    }

    /// Weight of the same cycle with `c_ef` per EF arc and `c_ic` per IC arc removed.
    pub fn unshifted_weight(&self, shift: (f64, f64)) -> f64 {
        self.total_weight - self.n_ef as f64 * shift.0 - self.n_ic as f64 * shift.1
    }
}

/// Outcome of the label-correcting search.
pub(crate) enum Search {
    Settled(Vec<f64>),
    Negative(WitnessCycle),
}

/// Passes allowed per vertex before a run that keeps relaxing without closing a
/// sufficiently negative predecessor cycle is declared settled.
const PASS_BUDGET_PER_VERTEX: usize = 64;

pub(crate) fn label_correcting(g: &ConstraintGraph, filter: ArcFilter) -> Search {
    let n = g.vertex_count();
    let tol = g.tolerance();
    let arcs: Vec<&Arc> = g.arcs().iter().filter(|a| filter.admits(a.kind)).collect();
    let mut dist = vec![0.0f64; n];
    let mut pred: Vec<Option<usize>> = vec![None; n];

    let budget = PASS_BUDGET_PER_VERTEX * (n + 1);
    for _ in 0..budget {
        let mut changed = false;
        for (k, a) in arcs.iter().enumerate() {
            let cand = dist[a.tail.0] + a.weight;
            if cand < dist[a.head.0] - tol {
                dist[a.head.0] = cand;
                pred[a.head.0] = Some(k);
                changed = true;
            }
        }
        if !changed {
            return Search::Settled(dist);
        }
        if let Some(cycle) = predecessor_cycle(&pred, &arcs) {
            if cycle.total_weight < -tol {
                return Search::Negative(cycle);
            }
        }
    }
    Search::Settled(dist)
}

/// First cycle in the predecessor graph, scanning start vertices in index order.
/// The returned cycle is rotated to begin at its lowest tail vertex.
fn predecessor_cycle(pred: &[Option<usize>], arcs: &[&Arc]) -> Option<WitnessCycle> {
    const UNSEEN: usize = usize::MAX;
    let mut stamp = vec![UNSEEN; pred.len()];
    for start in 0..pred.len() {
        let mut v = start;
        while stamp[v] == UNSEEN {
            stamp[v] = start;
            match pred[v] {
                Some(k) => v = arcs[k].tail.0,
                None => break,
            }
        }
        if stamp[v] != start || pred[v].is_none() {
            continue;
        }
        // `v` lies on a cycle discovered during this walk.
        let mut cycle = Vec::new();
        let mut u = v;
        loop {
            let arc = *arcs[pred[u].expect("on cycle")];
            cycle.push(arc);
            u = arc.tail.0;
            if u == v {
                break;
            }
        }
        cycle.reverse();
        let first = cycle
            .iter()
            .enumerate()
            .min_by_key(|(_, a)| a.tail)
            .map(|(k, _)| k)
            .unwrap_or(0);
        cycle.rotate_left(first);
        return Some(WitnessCycle::from_arcs(cycle));
    }
    None
}

/// A negative cycle using only arcs admitted by `filter`, if one exists.
pub fn find_negative_cycle(g: &ConstraintGraph, filter: ArcFilter) -> Option<WitnessCycle> {
    match label_correcting(g, filter) {
        Search::Settled(_) => None,
        Search::Negative(c) => Some(c),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImplementabilityReport {
    pub ef_implementable: bool,
    pub ic_implementable: bool,
    pub ef_and_ic_implementable: bool,
    pub ef_witness: Option<WitnessCycle>,
    pub ic_witness: Option<WitnessCycle>,
    pub ef_and_ic_witness: Option<WitnessCycle>,
}

impl ImplementabilityReport {
    /// Separate payment functions exist for each property.
    pub fn ef_or_ic_implementable(&self) -> bool {
        self.ef_implementable && self.ic_implementable
    }
}

pub fn classify(inst: &Instance) -> ImplementabilityReport {
    classify_graph(&build_graph(inst))
}

pub fn classify_graph(g: &ConstraintGraph) -> ImplementabilityReport {
    let ef_witness = find_negative_cycle(g, ArcFilter::EfOnly);
    let ic_witness = find_negative_cycle(g, ArcFilter::IcOnly);
    let ef_and_ic_witness = find_negative_cycle(g, ArcFilter::All);
    ImplementabilityReport {
        ef_implementable: ef_witness.is_none(),
        ic_implementable: ic_witness.is_none(),
        ef_and_ic_implementable: ef_and_ic_witness.is_none(),
        ef_witness,
        ic_witness,
        ef_and_ic_witness,
    }
}

/// Largest agent count accepted by [`local_efficiency_check`].
pub const MAX_PERMUTATION_AGENTS: usize = 8;

/// A profile and a reassignment of bundles (`agent i` gets `a_{perm[i]}`)
/// raising total value by `gain`.
#[derive(Debug, Clone, PartialEq)]
pub struct PermutationWitness {
    pub profile: Profile,
    pub permutation: Vec<usize>,
    pub gain: f64,
}

/// Brute-force local efficiency: no profile admits a permutation of the
/// assigned bundles with higher total value. `None` when the allocation is
/// locally efficient.
pub fn local_efficiency_check(inst: &Instance) -> Result<Option<PermutationWitness>, Error> {
    let m = inst.num_agents();
    if m > MAX_PERMUTATION_AGENTS {
        return Err(Error::TooManyAgents {
            agents: m,
            limit: MAX_PERMUTATION_AGENTS,
        });
    }
    let tol = inst.tolerance();
    let space = inst.profile_space();
    for rank in 0..space.len() {
        let truthful: f64 = (0..m).map(|i| inst.value_of_share(rank, i, i)).sum();
        let mut perm: Vec<usize> = (0..m).collect();
        while next_permutation(&mut perm) {
            let permuted: f64 = (0..m).map(|i| inst.value_of_share(rank, i, perm[i])).sum();
            if permuted > truthful + tol {
                return Ok(Some(PermutationWitness {
                    profile: space.unrank(rank),
                    permutation: perm,
                    gain: permuted - truthful,
                }));
            }
        }
    }
    Ok(None)
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// A sequence of one agent's types, others fixed, whose cyclic sum
/// `sum_k v^k(a(v^k)) - v^k(a(v^{k+1}))` is negative.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityWitness {
    pub agent: usize,
    /// Profile at the first type of the sequence.
    pub profile: Profile,
    pub sequence: Vec<usize>,
    pub sum: f64,
}

/// Brute-force cycle monotonicity over simple type sequences of length
/// `2..=k_max`. `None` when every such sum is at least `-tol`.
///
/// With finite type spaces `k_max = max_i |T_i|` is exhaustive: a violating
/// closed sequence with repeats splits into simple ones, one of which violates.
pub fn cycle_monotonicity_check(
    inst: &Instance,
    k_max: usize,
) -> Result<Option<MonotonicityWitness>, Error> {
    if k_max < 2 {
        return Err(Error::CycleBoundTooSmall(k_max));
    }
    let tol = inst.tolerance();
    let space = inst.profile_space();
    for agent in 0..inst.num_agents() {
        let n_types = space.sizes()[agent];
        let k_limit = k_max.min(n_types);
        for base in (0..space.len()).filter(|&r| space.coordinate(r, agent) == 0) {
            // gain[t][s]: value under type t of what is allocated when reporting s.
            let gain = |t: usize, s: usize| {
                inst.value(
                    agent,
                    t,
                    inst.assigned(space.with_coordinate(base, agent, s), agent),
                )
            };
            for first in 0..n_types {
                let mut seq = vec![first];
                let mut used = vec![false; n_types];
                used[first] = true;
                if let Some(sequence) = search_sequences(&mut seq, &mut used, k_limit, tol, &gain) {
                    let sum = cyclic_sum(&sequence, &gain);
                    return Ok(Some(MonotonicityWitness {
                        agent,
                        profile: space.unrank(space.with_coordinate(base, agent, first)),
                        sequence,
                        sum,
                    }));
                }
            }
        }
    }
    Ok(None)
}

fn cyclic_sum(seq: &[usize], gain: &impl Fn(usize, usize) -> f64) -> f64 {
    let k = seq.len();
    (0..k)
        .map(|j| {
            let (cur, next) = (seq[j], seq[(j + 1) % k]);
            gain(cur, cur) - gain(cur, next)
        })
        .sum()
}

/// Extends `seq` (whose first element is its minimum) by larger unused types.
fn search_sequences(
    seq: &mut Vec<usize>,
    used: &mut [bool],
    k_limit: usize,
    tol: f64,
    gain: &impl Fn(usize, usize) -> f64,
) -> Option<Vec<usize>> {
    if seq.len() >= 2 && cyclic_sum(seq, gain) < -tol {
        return Some(seq.clone());
    }
    if seq.len() == k_limit {
        return None;
    }
    for t in seq[0] + 1..used.len() {
        if used[t] {
            continue;
        }
        used[t] = true;
        seq.push(t);
        let found = search_sequences(seq, used, k_limit, tol, gain);
        seq.pop();
        used[t] = false;
        if found.is_some() {
            return found;
        }
    }
    None
}
