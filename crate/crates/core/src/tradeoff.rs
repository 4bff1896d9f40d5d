//! Trading approximate envy-freeness against approximate truthfulness.
//!
//! A pair `(c_ef, c_ic)` is cycle-correcting when adding `c_ef` to every EF arc
//! and `c_ic` to every IC arc leaves no negative cycle. Every cycle `C` gives
//! the half-plane `n_ef(C) c_ef + n_ic(C) c_ic >= -w(C)`, so the correcting
//! pairs form a convex polygon with recession cone the positive quadrant, and
//! its lower-left boundary (the minimal pairs) is a convex polyline.
//!
//! [`pareto_frontier`] finds that polyline by cutting planes: compute the
//! boundary for the cycles found so far, probe each of its vertices with the
//! negative-cycle search, add whatever cycles come back, repeat. When every
//! vertex probes clean, the known cycles already describe the whole boundary.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::cycles::{find_negative_cycle, ArcFilter, WitnessCycle};
use crate::error::Error;
use crate::graph::{shift_graph, Arc, ArcKind, ConstraintGraph, VertexId};
use crate::payments::{compute_payments, PaymentTable};

/// Absolute tolerance for frontier coordinates.
pub const FRONTIER_TOLERANCE: f64 = 1e-7;

/// Default cap on cutting-plane rounds.
pub const DEFAULT_MAX_ROUNDS: usize = 10_000;

const BISECTION_STEPS: usize = 200;

pub fn is_cycle_correcting(g: &ConstraintGraph, c_ef: f64, c_ic: f64) -> Result<bool, Error> {
    let shifted = shift_graph(g, c_ef, c_ic)?;
    Ok(find_negative_cycle(&shifted, ArcFilter::All).is_none())
}

fn axis_shift(axis: ArcKind, c: f64) -> (f64, f64) {
    match axis {
        ArcKind::Ef => (c, 0.0),
        ArcKind::Ic => (0.0, c),
    }
}

fn probe(g: &ConstraintGraph, shift: (f64, f64)) -> Result<Option<WitnessCycle>, Error> {
    let shifted = shift_graph(g, shift.0, shift.1)?;
    Ok(find_negative_cycle(&shifted, ArcFilter::All))
}

/// Least `c` such that shifting only `axis` arcs by `c` is cycle-correcting:
/// the largest `-w(C) / n_axis(C)` over cycles.
///
/// Found by bisection on `[0, max|w| * |V|]`; the best cycle ratio seen on the
/// infeasible side is returned instead of the bracket end whenever it probes
/// feasible, which recovers the exact ratio.
pub fn min_shift_one_sided(g: &ConstraintGraph, axis: ArcKind) -> Result<f64, Error> {
    let other = match axis {
        ArcKind::Ef => ArcFilter::IcOnly,
        ArcKind::Ic => ArcFilter::EfOnly,
    };
    if let Some(witness) = find_negative_cycle(g, other) {
        return Err(Error::InfeasibleAxis { axis, witness });
    }
    if find_negative_cycle(g, ArcFilter::All).is_none() {
        return Ok(0.0);
    }

    let n_axis = |c: &WitnessCycle| match axis {
        ArcKind::Ef => c.n_ef,
        ArcKind::Ic => c.n_ic,
    };
    let mut lo = 0.0f64;
    let mut hi = (g.max_abs_weight() * g.vertex_count() as f64).max(g.tolerance());
    while probe(g, axis_shift(axis, hi))?.is_some() {
        // Only reachable through rounding; the bracket is a bound on every ratio.
        hi *= 2.0;
    }
    let mut best_ratio: Option<f64> = None;
    for _ in 0..BISECTION_STEPS {
        if hi - lo <= 1e-13 * hi.max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        match probe(g, axis_shift(axis, mid))? {
            None => hi = mid,
            Some(c) => {
                lo = mid;
                let k = n_axis(&c);
                if k > 0 {
                    let ratio = -c.unshifted_weight(axis_shift(axis, mid)) / k as f64;
                    best_ratio = Some(best_ratio.map_or(ratio, |r: f64| r.max(ratio)));
                }
            }
        }
    }
    match best_ratio {
        Some(r) if probe(g, axis_shift(axis, r))?.is_none() => Ok(r),
        _ => Ok(hi),
    }
}

/// Shortest-path payments on the shifted graph: `c_ef`-approximately envy-free
/// and `c_ic`-approximately truthful against `g`.
pub fn approx_payments(g: &ConstraintGraph, c_ef: f64, c_ic: f64) -> Result<PaymentTable, Error> {
    compute_payments(&shift_graph(g, c_ef, c_ic)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontierVertex {
    pub c_ef: f64,
    pub c_ic: f64,
    /// Known cycles whose constraint is tight here, with weights of the input graph.
    pub binding: Vec<WitnessCycle>,
}

/// Minimal cycle-correcting pairs as a polyline, `c_ef` strictly decreasing
/// and `c_ic` strictly increasing along `vertices`.
#[derive(Debug, Clone, PartialEq)]
pub struct Frontier {
    pub vertices: Vec<FrontierVertex>,
    /// False when the round cap was hit before every vertex probed clean.
    pub complete: bool,
    pub rounds: usize,
    /// Distinct cycles discovered.
    pub cuts: usize,
}

impl Frontier {
    /// Slope `d c_ic / d c_ef` of each segment between consecutive vertices.
    pub fn slopes(&self) -> Vec<f64> {
        self.vertices
            .windows(2)
            .map(|w| (w[1].c_ic - w[0].c_ic) / (w[1].c_ef - w[0].c_ef))
            .collect()
    }
}

/// A discovered cycle as the half-plane `n_ef x + n_ic y >= rhs`.
#[derive(Debug, Clone)]
struct Cut {
    n_ef: f64,
    n_ic: f64,
    rhs: f64,
    witness: WitnessCycle,
}

pub fn pareto_frontier(g: &ConstraintGraph) -> Frontier {
    pareto_frontier_with_limit(g, DEFAULT_MAX_ROUNDS)
}

pub fn pareto_frontier_with_limit(g: &ConstraintGraph, max_rounds: usize) -> Frontier {
    let by_endpoints: BTreeMap<(VertexId, VertexId), Arc> =
        g.arcs().iter().map(|a| ((a.tail, a.head), *a)).collect();
    let mut cuts: Vec<Cut> = Vec::new();
    let mut rounds = 0;
    let mut complete = false;
    let mut points = lower_boundary(&cuts);

    while rounds < max_rounds {
        rounds += 1;
        let mut added = false;
        for &(x, y) in &points {
            let Ok(Some(found)) = probe(g, (x, y)) else {
                continue;
            };
            // Re-express in the input graph's weights.
            let witness = WitnessCycle::from_arcs(
                found
                    .arcs
                    .iter()
                    .map(|a| by_endpoints[&(a.tail, a.head)])
                    .collect(),
            );
            if cuts.iter().any(|c| c.witness.arcs == witness.arcs) || witness.total_weight >= 0.0 {
                continue;
            }
            cuts.push(Cut {
                n_ef: witness.n_ef as f64,
                n_ic: witness.n_ic as f64,
                rhs: -witness.total_weight,
                witness,
            });
            added = true;
        }
        if !added {
            complete = true;
            break;
        }
        points = lower_boundary(&cuts);
    }

    let vertices = points
        .iter()
        .rev()
        .map(|&(x, y)| FrontierVertex {
            c_ef: x,
            c_ic: y,
            binding: cuts
                .iter()
                .filter(|c| (c.n_ef * x + c.n_ic * y - c.rhs).abs() <= 1e-9 * c.rhs.max(1.0))
                .map(|c| c.witness.clone())
                .collect(),
        })
        .collect();
    Frontier {
        vertices,
        complete,
        rounds,
        cuts: cuts.len(),
    }
}

fn slack_eps(rhs: f64) -> f64 {
    1e-12 * rhs.abs().max(1.0)
}

/// Vertices of the lower-left boundary of `{x, y >= 0} ∩ cuts`, by increasing x.
fn lower_boundary(cuts: &[Cut]) -> Vec<(f64, f64)> {
    if cuts.is_empty() {
        return vec![(0.0, 0.0)];
    }
    // Lines a x + b y = c, including both axes.
    let mut lines: Vec<(f64, f64, f64)> = cuts.iter().map(|c| (c.n_ef, c.n_ic, c.rhs)).collect();
    lines.push((1.0, 0.0, 0.0));
    lines.push((0.0, 1.0, 0.0));

    let feasible = |x: f64, y: f64| {
        x >= -1e-12
            && y >= -1e-12
            && cuts
                .iter()
                .all(|c| c.n_ef * x + c.n_ic * y >= c.rhs - slack_eps(c.rhs))
    };
    let mut candidates = Vec::new();
    for (k, &(a1, b1, c1)) in lines.iter().enumerate() {
        for &(a2, b2, c2) in &lines[k + 1..] {
            let det = a1 * b2 - a2 * b1;
            if det.abs() < 1e-12 {
                continue;
            }
            let x = (c1 * b2 - c2 * b1) / det;
            let y = (a1 * c2 - a2 * c1) / det;
            if feasible(x, y) {
                candidates.push((x.max(0.0), y.max(0.0)));
            }
        }
    }
    candidates.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));

    // Pareto-minimal staircase: x increasing, y strictly decreasing.
    let mut stairs: Vec<(f64, f64)> = Vec::new();
    for p in candidates {
        match stairs.last() {
            Some(last) if p.1 >= last.1 - 1e-12 => {}
            Some(last) if p.0 <= last.0 + 1e-12 => {
                stairs.pop();
                stairs.push(p);
            }
            _ => stairs.push(p),
        }
    }

    // Lower convex chain through the staircase drops points above the boundary.
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for p in stairs {
        while hull.len() >= 2 {
            let o = hull[hull.len() - 2];
            let a = hull[hull.len() - 1];
            let cross = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
            if cross <= 1e-15 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{gen_example, ExampleId};
    use crate::graph::build_graph;

    fn cut(n_ef: f64, n_ic: f64, rhs: f64) -> Cut {
        Cut {
            n_ef,
            n_ic,
            rhs,
            witness: WitnessCycle::from_arcs(Vec::new()),
        }
    }

    #[test]
    fn boundary_of_single_cut_is_a_segment() {
        let pts = lower_boundary(&[cut(4.0, 4.0, 0.1)]);
        assert_eq!(pts, vec![(0.0, 0.025), (0.025, 0.0)]);
    }

    #[test]
    fn boundary_with_two_cuts_has_a_kink() {
        // x + 2y >= 2 and 2x + y >= 2 meet at (2/3, 2/3).
        let pts = lower_boundary(&[cut(1.0, 2.0, 2.0), cut(2.0, 1.0, 2.0)]);
        assert_eq!(pts.len(), 3);
        assert_eq!(pts[0], (0.0, 2.0));
        assert!((pts[1].0 - 2.0 / 3.0).abs() < 1e-15 && (pts[1].1 - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(pts[2], (2.0, 0.0));
    }

    #[test]
    fn boundary_with_a_pure_cut_stays_off_the_axis() {
        // A pure EF cycle forces x >= 1.
        let pts = lower_boundary(&[cut(1.0, 0.0, 1.0), cut(1.0, 1.0, 3.0)]);
        assert_eq!(pts, vec![(1.0, 2.0), (3.0, 0.0)]);
        // Redundant cut above the boundary changes nothing.
        let pts = lower_boundary(&[cut(1.0, 0.0, 1.0), cut(1.0, 1.0, 3.0), cut(1.0, 1.0, 1.0)]);
        assert_eq!(pts, vec![(1.0, 2.0), (3.0, 0.0)]);
    }

    #[test]
    fn feasible_graph_frontier_is_origin() {
        let g = build_graph(&gen_example(&ExampleId::fig1_default()).unwrap());
        let f = pareto_frontier(&g);
        assert!(f.complete);
        assert_eq!(f.vertices.len(), 1);
        assert_eq!((f.vertices[0].c_ef, f.vertices[0].c_ic), (0.0, 0.0));
        assert_eq!(min_shift_one_sided(&g, ArcKind::Ef).unwrap(), 0.0);
        assert_eq!(min_shift_one_sided(&g, ArcKind::Ic).unwrap(), 0.0);
        assert!(is_cycle_correcting(&g, 0.0, 0.0).unwrap());
    }

    #[test]
    fn dictator_has_no_finite_ic_shift() {
        let g = build_graph(&gen_example(&ExampleId::claim1_default()).unwrap());
        match min_shift_one_sided(&g, ArcKind::Ic) {
            Err(Error::InfeasibleAxis {
                axis: ArcKind::Ic,
                witness,
            }) => {
                assert_eq!(witness.total_weight, -1.0);
                assert_eq!(witness.n_ic, 0);
            }
            other => panic!("{other:?}"),
        }
        // The EF axis fixes it: two EF arcs, weight -1.
        let c = min_shift_one_sided(&g, ArcKind::Ef).unwrap();
        assert!((c - 0.5).abs() < 1e-12);
    }

    #[test]
    fn frontier_vertices_are_monotone_and_feasible() {
        let g = build_graph(&gen_example(&ExampleId::claim3_default()).unwrap());
        let f = pareto_frontier(&g);
        assert!(f.complete);
        for w in f.vertices.windows(2) {
            assert!(w[0].c_ef > w[1].c_ef && w[0].c_ic < w[1].c_ic);
        }
        for v in &f.vertices {
            assert!(is_cycle_correcting(&g, v.c_ef, v.c_ic).unwrap());
            assert!(!v.binding.is_empty());
        }
        assert!(f.slopes().iter().all(|s| *s < 0.0));
    }

    #[test]
    fn shifts_must_be_nonnegative() {
        let g = build_graph(&gen_example(&ExampleId::claim3_default()).unwrap());
        assert!(is_cycle_correcting(&g, -1.0, 0.0).is_err());
        assert!(approx_payments(&g, 0.0, -1.0).is_err());
    }
}
