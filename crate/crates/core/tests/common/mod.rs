//! Test-only oracles, independent of the library's search paths.
#![allow(dead_code)]

use efic_core::{ArcKind, ConstraintGraph, Instance, InstanceParts, TypeSpec};
use rand::Rng;

/// `(n_ef, n_ic, weight)` of one simple cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleSummary {
    pub n_ef: usize,
    pub n_ic: usize,
    pub weight: f64,
}

/// Every simple cycle of `g`, each reported once (rooted at its smallest vertex).
pub fn all_simple_cycles(g: &ConstraintGraph) -> Vec<CycleSummary> {
    let n = g.vertex_count();
    let mut out_arcs: Vec<Vec<(usize, f64, ArcKind)>> = vec![Vec::new(); n];
    for a in g.arcs() {
        out_arcs[a.tail.0].push((a.head.0, a.weight, a.kind));
    }
    let mut found = Vec::new();
    for root in 0..n {
        let mut on_path = vec![false; n];
        on_path[root] = true;
        dfs(root, root, 0, 0, 0.0, &out_arcs, &mut on_path, &mut found);
    }
    found
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    root: usize,
    v: usize,
    n_ef: usize,
    n_ic: usize,
    weight: f64,
    out: &[Vec<(usize, f64, ArcKind)>],
    on_path: &mut [bool],
    found: &mut Vec<CycleSummary>,
) {
    for &(u, w, kind) in &out[v] {
        let (e, i) = match kind {
            ArcKind::Ef => (n_ef + 1, n_ic),
            ArcKind::Ic => (n_ef, n_ic + 1),
        };
        if u == root {
            found.push(CycleSummary {
                n_ef: e,
                n_ic: i,
                weight: weight + w,
            });
        } else if u > root && !on_path[u] {
            on_path[u] = true;
            dfs(root, u, e, i, weight + w, out, on_path, found);
            on_path[u] = false;
        }
    }
}

/// Largest `-w / n_kind` over cycles with at least one arc of `kind`, or 0.
pub fn brute_one_sided(cycles: &[CycleSummary], kind: ArcKind) -> f64 {
    cycles
        .iter()
        .filter_map(|c| {
            let k = match kind {
                ArcKind::Ef => c.n_ef,
                ArcKind::Ic => c.n_ic,
            };
            (k > 0).then(|| -c.weight / k as f64)
        })
        .fold(0.0, f64::max)
}

/// Minimal `c_ic` at a given `c_ef`, straight from the half-planes of all
/// negative cycles. `None` if `c_ef` is below the pure-EF bound.
pub fn brute_min_ic_at(cycles: &[CycleSummary], c_ef: f64) -> Option<f64> {
    let mut y: f64 = 0.0;
    for c in cycles.iter().filter(|c| c.weight < 0.0) {
        let need = -c.weight - c.n_ef as f64 * c_ef;
        if c.n_ic == 0 {
            if need > 1e-12 {
                return None;
            }
        } else {
            y = y.max(need / c.n_ic as f64);
        }
    }
    Some(y)
}

/// Smallest slack of `(x, y)` over every cycle half-plane.
pub fn brute_min_slack(cycles: &[CycleSummary], x: f64, y: f64) -> f64 {
    cycles
        .iter()
        .map(|c| c.weight + c.n_ef as f64 * x + c.n_ic as f64 * y)
        .fold(f64::INFINITY, f64::min)
}

/// Random instance: `m <= 3` agents, `<= 3` types each, `<= 4` bundles,
/// values quarter-quantized in `[-2, 2]`, arbitrary allocation.
pub fn random_instance<R: Rng>(rng: &mut R) -> Instance {
    let m = rng.gen_range(1..=3);
    let n_bundles = rng.gen_range(1..=4);
    let bundles: Vec<String> = (0..n_bundles).map(|k| format!("b{k}")).collect();
    let types: Vec<Vec<TypeSpec>> = (0..m)
        .map(|_| {
            let n_types = rng.gen_range(1..=3);
            (0..n_types)
                .map(|t| {
                    TypeSpec::new(
                        bundles
                            .iter()
                            .map(|b| (b.clone(), rng.gen_range(-8..=8) as f64 * 0.25)),
                    )
                    .named(format!("t{t}"))
                })
                .collect()
        })
        .collect();
    let sizes: Vec<usize> = types.iter().map(Vec::len).collect();
    let space = efic_core::ProfileSpace::new(sizes);
    let allocation = space
        .iter()
        .map(|p| {
            let assigned = (0..m)
                .map(|_| bundles[rng.gen_range(0..n_bundles)].clone())
                .collect();
            (p, assigned)
        })
        .collect();
    Instance::from_parts(InstanceParts {
        agents: m,
        bundles,
        types,
        allocation,
    })
    .expect("generated instance is valid")
}
