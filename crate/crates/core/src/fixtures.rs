//! Single-good example instances and the standard mechanisms over them.
//!
//! Divisible allocations are encoded as bundle ids `frac_<x>` whose value to an
//! agent with whole-good value `z` is `x * z`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::graph::{Arc, ArcKind, ConstraintGraph};
use crate::model::{Instance, InstanceParts, TypeSpec};
use crate::payments::PaymentTable;

pub const ITEM: &str = "item";
pub const EMPTY: &str = "empty";

#[derive(Debug, Clone, PartialEq)]
pub enum ExampleId {
    /// One indivisible item to the highest value (lowest index on ties);
    /// every agent's type space is `grid`.
    Fig1 { agents: usize, grid: Vec<f64> },
    /// One indivisible item always given to agent 0; agent `k` has the single
    /// type `values[k]`.
    Claim1 { values: Vec<f64> },
    /// Two agents sharing a divisible good by a locally efficient but
    /// non-monotone rule. Types are whole-good values.
    Claim2 { z1: Vec<f64>, z2: Vec<f64> },
    /// Three agents, two types for agents 0 and 1, one for agent 2.
    Claim3 {
        z3: f64,
        z1_0: f64,
        z1_1: f64,
        z2_0: f64,
        z2_1: f64,
    },
}

impl ExampleId {
    pub const NAMES: [&'static str; 4] = [
        "fig1-single-item",
        "claim1-dictator",
        "claim2-proportional",
        "claim3-8cycle",
    ];

    pub fn fig1_default() -> Self {
        ExampleId::Fig1 {
            agents: 3,
            grid: vec![2.0, 3.0],
        }
    }

    pub fn claim1_default() -> Self {
        ExampleId::Claim1 {
            values: vec![1.0, 2.0],
        }
    }

    pub fn claim2_default() -> Self {
        ExampleId::Claim2 {
            z1: vec![1.0, 1.9],
            z2: vec![2.0],
        }
    }

    pub fn claim3_default() -> Self {
        ExampleId::Claim3 {
            z3: 0.0,
            z1_0: 1.0,
            z1_1: 1.0,
            z2_0: 2.0,
            z2_1: 2.0,
        }
    }

    /// Default parameters for a full name or its short prefix (`fig1`, `claim3`, ...).
    pub fn by_name(name: &str) -> Option<Self> {
        let short = name.split('-').next().unwrap_or(name);
        match short {
            "fig1" => Some(Self::fig1_default()),
            "claim1" => Some(Self::claim1_default()),
            "claim2" => Some(Self::claim2_default()),
            "claim3" => Some(Self::claim3_default()),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ExampleId::Fig1 { .. } => Self::NAMES[0],
            ExampleId::Claim1 { .. } => Self::NAMES[1],
            ExampleId::Claim2 { .. } => Self::NAMES[2],
            ExampleId::Claim3 { .. } => Self::NAMES[3],
        }
    }

    /// Candidate outcomes for the single-item examples: "agent k gets the item".
    pub fn candidates(&self) -> Option<Vec<Vec<String>>> {
        let m = match self {
            ExampleId::Fig1 { agents, .. } => *agents,
            ExampleId::Claim1 { values } => values.len(),
            _ => return None,
        };
        Some(single_item_candidates(m))
    }
}

fn single_item_candidates(m: usize) -> Vec<Vec<String>> {
    (0..m)
        .map(|winner| {
            (0..m)
                .map(|k| if k == winner { ITEM } else { EMPTY }.to_string())
                .collect()
        })
        .collect()
}

fn item_type(z: f64) -> TypeSpec {
    TypeSpec::new([(ITEM, z), (EMPTY, 0.0)]).named(format!("z={z}"))
}

fn require(ok: bool, msg: impl FnOnce() -> String) -> Result<(), Error> {
    if ok {
        Ok(())
    } else {
        Err(Error::ExampleParameters(msg()))
    }
}

fn require_finite(values: &[f64], what: &str) -> Result<(), Error> {
    require(values.iter().all(|v| v.is_finite()), || {
        format!("{what} must be finite")
    })
}

fn require_distinct(values: &[f64], what: &str) -> Result<(), Error> {
    for (k, a) in values.iter().enumerate() {
        require(!values[..k].contains(a), || {
            format!("{what} has repeated value {a}")
        })?;
    }
    Ok(())
}

pub fn gen_example(id: &ExampleId) -> Result<Instance, Error> {
    match id {
        ExampleId::Fig1 { agents, grid } => {
            require(*agents >= 1, || "fig1 needs at least one agent".into())?;
            require(!grid.is_empty(), || "fig1 grid must be nonempty".into())?;
            require_finite(grid, "fig1 grid")?;
            require_distinct(grid, "fig1 grid")?;
            let parts = InstanceParts {
                agents: *agents,
                bundles: vec![ITEM.into(), EMPTY.into()],
                types: vec![grid.iter().map(|&z| item_type(z)).collect(); *agents],
                allocation: Vec::new(),
            };
            welfare_max_allocation(parts, &single_item_candidates(*agents))
        }
        ExampleId::Claim1 { values } => {
            require(!values.is_empty(), || {
                "claim1 needs at least one agent".into()
            })?;
            require_finite(values, "claim1 values")?;
            let m = values.len();
            let assigned = single_item_candidates(m).swap_remove(0);
            let parts = InstanceParts {
                agents: m,
                bundles: vec![ITEM.into(), EMPTY.into()],
                types: values.iter().map(|&z| vec![item_type(z)]).collect(),
                allocation: vec![(vec![0; m], assigned)],
            };
            Ok(Instance::from_parts(parts)?)
        }
        ExampleId::Claim2 { z1, z2 } => {
            for (zs, what) in [(z1, "claim2 z1"), (z2, "claim2 z2")] {
                require(!zs.is_empty(), || format!("{what} must be nonempty"))?;
                require_finite(zs, what)?;
                require(zs.iter().all(|&z| z > 0.0), || {
                    format!("{what} must be positive")
                })?;
                require_distinct(zs, what)?;
            }
            let mut rows = Vec::new();
            for (t1, &a) in z1.iter().enumerate() {
                for (t2, &b) in z2.iter().enumerate() {
                    let (f1, f2) = claim2_shares(a, b);
                    rows.push((vec![t1, t2], [f1, f2]));
                }
            }
            let fractions = distinct_in_order(rows.iter().flat_map(|(_, f)| f.iter().copied()));
            Ok(Instance::from_parts(divisible_parts(
                &[z1.clone(), z2.clone()],
                &fractions,
                rows.into_iter().map(|(p, f)| (p, f.to_vec())),
                |agent, t| format!("z{}={}", agent + 1, [z1, z2][agent][t]),
            ))?)
        }
        ExampleId::Claim3 {
            z3,
            z1_0,
            z1_1,
            z2_0,
            z2_1,
        } => {
            let all = [*z3, *z1_0, *z1_1, *z2_0, *z2_1];
            require_finite(&all, "claim3 parameters")?;
            require(
                z2_0 >= z2_1 && z2_1 > z1_0 && z1_0 >= z1_1 && z1_1 >= z3,
                || {
                    format!(
                    "claim3 requires z2_0 >= z2_1 > z1_0 >= z1_1 >= z3, got z2=({z2_0}, {z2_1}) z1=({z1_0}, {z1_1}) z3={z3}"
                )
                },
            )?;
            let fractions = [0.0, 0.2, 0.4, 0.5];
            let mut rows = Vec::new();
            for b1 in 0..2 {
                for b2 in 0..2 {
                    let shares = if b1 == 1 && b2 == 1 {
                        vec![0.4, 0.4, 0.2]
                    } else {
                        vec![0.5, 0.5, 0.0]
                    };
                    rows.push((vec![b1, b2, 0], shares));
                }
            }
            Ok(Instance::from_parts(divisible_parts(
                &[vec![*z1_0, *z1_1], vec![*z2_0, *z2_1], vec![*z3]],
                &fractions,
                rows,
                |agent, t| {
                    if agent == 2 {
                        "v3".into()
                    } else {
                        format!("v{}^{}", agent + 1, t)
                    }
                },
            ))?)
        }
    }
}

/// Shares `(alpha_1, alpha_2)` of the non-monotone two-agent rule.
pub fn claim2_shares(z1: f64, z2: f64) -> (f64, f64) {
    let s = z1 + z2;
    if z1 == z2 {
        (0.5, 0.5)
    } else if z1 < z2 {
        (0.25 - z1 / (2.0 * s), 0.75 + z1 / (2.0 * s))
    } else {
        (0.75 + z2 / (2.0 * s), 0.25 - z2 / (2.0 * s))
    }
}

pub fn fraction_bundle(x: f64) -> String {
    format!("frac_{x}")
}

fn distinct_in_order(xs: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for x in xs {
        if !out.iter().any(|y| y.to_bits() == x.to_bits()) {
            out.push(x);
        }
    }
    out
}

fn divisible_parts(
    whole_values: &[Vec<f64>],
    fractions: &[f64],
    rows: impl IntoIterator<Item = (Vec<usize>, Vec<f64>)>,
    name: impl Fn(usize, usize) -> String,
) -> InstanceParts {
    InstanceParts {
        agents: whole_values.len(),
        bundles: fractions.iter().map(|&x| fraction_bundle(x)).collect(),
        types: whole_values
            .iter()
            .enumerate()
            .map(|(agent, zs)| {
                zs.iter()
                    .enumerate()
                    .map(|(t, &z)| {
                        TypeSpec::new(fractions.iter().map(|&x| (fraction_bundle(x), x * z)))
                            .named(name(agent, t))
                    })
                    .collect()
            })
            .collect(),
        allocation: rows
            .into_iter()
            .map(|(p, shares)| (p, shares.into_iter().map(fraction_bundle).collect()))
            .collect(),
    }
}

fn check_candidates(inst: &Instance, candidates: &[Vec<String>]) -> Result<Vec<Vec<usize>>, Error> {
    if candidates.is_empty() {
        return Err(Error::BadCandidates("no candidate outcomes".into()));
    }
    candidates
        .iter()
        .map(|c| {
            if c.len() != inst.num_agents() {
                return Err(Error::BadCandidates(format!(
                    "candidate assigns {} bundles to {} agents",
                    c.len(),
                    inst.num_agents()
                )));
            }
            c.iter()
                .map(|b| {
                    inst.bundle_index(b)
                        .ok_or_else(|| Error::BadCandidates(format!("unknown bundle {b:?}")))
                })
                .collect()
        })
        .collect()
}

/// Welfare of `outcome` (bundle indices) at profile `rank`, skipping `skip`.
fn welfare(inst: &Instance, rank: usize, outcome: &[usize], skip: Option<usize>) -> f64 {
    let space = inst.profile_space();
    outcome
        .iter()
        .enumerate()
        .filter(|&(i, _)| Some(i) != skip)
        .map(|(i, &b)| inst.value(i, space.coordinate(rank, i), b))
        .sum()
}

/// Fills the allocation of `parts` with a welfare-maximizing candidate at
/// every profile; ties go to the earliest candidate.
pub fn welfare_max_allocation(
    mut parts: InstanceParts,
    candidates: &[Vec<String>],
) -> Result<Instance, Error> {
    let first = candidates
        .first()
        .ok_or_else(|| Error::BadCandidates("no candidate outcomes".into()))?
        .clone();
    // Validate types against a placeholder table, then choose per profile.
    let sizes: Vec<usize> = parts.types.iter().map(Vec::len).collect();
    let space = crate::model::ProfileSpace::new(sizes);
    parts.allocation = space.iter().map(|p| (p, first.clone())).collect();
    let scratch = Instance::from_parts(parts.clone())?;
    let encoded = check_candidates(&scratch, candidates)?;

    parts.allocation = (0..space.len())
        .map(|rank| {
            let mut best = 0;
            let mut best_w = welfare(&scratch, rank, &encoded[0], None);
            for (k, c) in encoded.iter().enumerate().skip(1) {
                let w = welfare(&scratch, rank, c, None);
                if w > best_w {
                    best = k;
                    best_w = w;
                }
            }
            (space.unrank(rank), candidates[best].clone())
        })
        .collect();
    Ok(Instance::from_parts(parts)?.with_tolerance(scratch.tolerance())?)
}

/// VCG payments with the Clarke pivot `h_i = max_c sum_{j != i} v_j(c_j)`.
///
/// With one agent the maximum is over empty sums, so `h_1 = 0` and `p_1 = 0`.
pub fn clarke_payments(inst: &Instance, candidates: &[Vec<String>]) -> Result<PaymentTable, Error> {
    let encoded = check_candidates(inst, candidates)?;
    let m = inst.num_agents();
    let space = inst.profile_space();
    let tol = inst.tolerance();
    let mut values = vec![0.0; space.len() * m];
    for rank in 0..space.len() {
        let chosen = inst.outcome(rank);
        let best = encoded
            .iter()
            .map(|c| welfare(inst, rank, c, None))
            .fold(f64::NEG_INFINITY, f64::max);
        if welfare(inst, rank, chosen, None) < best - tol {
            return Err(Error::NotWelfareMaximizing {
                profile: space.unrank(rank),
            });
        }
        for i in 0..m {
            let pivot = encoded
                .iter()
                .map(|c| welfare(inst, rank, c, Some(i)))
                .fold(f64::NEG_INFINITY, f64::max);
            values[rank * m + i] = pivot - welfare(inst, rank, chosen, Some(i));
        }
    }
    Ok(PaymentTable::new(m, values))
}

/// The three payment rules for a single item given to the highest value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingleItemRule {
    /// Winner pays the lowest other value; loser `j` pays the lowest value
    /// other than its own, minus the winner's value. VCG without the pivot.
    VcgLowestOther,
    /// Winner pays nothing; every loser is paid the highest loser value.
    PayLosers,
    /// Winner pays the highest other value; losers pay nothing.
    ClarkePivot,
}

impl SingleItemRule {
    pub const ALL: [SingleItemRule; 3] = [
        SingleItemRule::VcgLowestOther,
        SingleItemRule::PayLosers,
        SingleItemRule::ClarkePivot,
    ];
}

/// Payments of `rule` on a single-item instance. Extremes over an empty set
/// of agents are taken as 0.
pub fn single_item_payments(
    g: &ConstraintGraph,
    inst: &Instance,
    rule: SingleItemRule,
) -> Result<PaymentTable, Error> {
    let item = inst
        .bundle_index(ITEM)
        .ok_or_else(|| Error::ExampleParameters("instance has no item bundle".into()))?;
    let m = inst.num_agents();
    let space = inst.profile_space();
    let mut winners = Vec::with_capacity(space.len());
    for rank in 0..space.len() {
        let w = (0..m)
            .find(|&i| inst.assigned(rank, i) == item)
            .ok_or_else(|| {
                Error::ExampleParameters(format!(
                    "nobody receives the item at profile {:?}",
                    space.unrank(rank)
                ))
            })?;
        winners.push(w);
    }
    let item_value = |rank: usize, k: usize| inst.value(k, space.coordinate(rank, k), item);
    let extreme = |rank: usize, skip: &[usize], pick: fn(f64, f64) -> f64| {
        (0..m)
            .filter(|k| !skip.contains(k))
            .map(|k| item_value(rank, k))
            .reduce(pick)
            .unwrap_or(0.0)
    };
    Ok(PaymentTable::from_fn(g, |agent, rank| {
        let winner = winners[rank];
        let is_winner = agent == winner;
        match rule {
            SingleItemRule::VcgLowestOther if is_winner => extreme(rank, &[winner], f64::min),
            SingleItemRule::VcgLowestOther => {
                extreme(rank, &[agent], f64::min) - item_value(rank, winner)
            }
            SingleItemRule::PayLosers if is_winner => 0.0,
            SingleItemRule::PayLosers => -extreme(rank, &[winner], f64::max),
            SingleItemRule::ClarkePivot if is_winner => extreme(rank, &[winner], f64::max),
            SingleItemRule::ClarkePivot => 0.0,
        }
    }))
}

/// The eight arcs of the mixed cycle over agents 0 and 1 in the
/// [`ExampleId::Claim3`] instance, listed so that each arc's head is the
/// previous arc's tail (traversed back to front it is a closed walk).
pub fn eight_cycle_arcs(g: &ConstraintGraph) -> Option<Vec<Arc>> {
    use ArcKind::{Ef, Ic};
    type End = (usize, [usize; 2]);
    let spec: [(End, End, ArcKind); 8] = [
        ((1, [0, 0]), (0, [0, 0]), Ef),
        ((1, [0, 1]), (1, [0, 0]), Ic),
        ((0, [0, 1]), (1, [0, 1]), Ef),
        ((0, [1, 1]), (0, [0, 1]), Ic),
        ((1, [1, 1]), (0, [1, 1]), Ef),
        ((1, [1, 0]), (1, [1, 1]), Ic),
        ((0, [1, 0]), (1, [1, 0]), Ef),
        ((0, [0, 0]), (0, [1, 0]), Ic),
    ];
    spec.iter()
        .map(|&((ta, [t1, t2]), (ha, [h1, h2]), kind)| {
            let tail = g.vertex_id(ta, &[t1, t2, 0])?;
            let head = g.vertex_id(ha, &[h1, h2, 0])?;
            g.arcs()
                .iter()
                .find(|a| a.tail == tail && a.head == head && a.kind == kind)
                .copied()
        })
        .collect()
}
