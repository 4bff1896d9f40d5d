//! Structural invariants, checked on generated instances.

mod common;

use std::collections::BTreeSet;

use common::random_instance;
use efic_core::graph::{ef_arc_count, ic_arc_count};
use efic_core::tradeoff::FRONTIER_TOLERANCE;
use efic_core::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn instance_from(seed: u64) -> Instance {
    random_instance(&mut ChaCha8Rng::seed_from_u64(seed))
}

fn quarter() -> impl Strategy<Value = f64> {
    (-16i32..=16).prop_map(|k| k as f64 * 0.25)
}

/// Renames agents by `perm` (new agent `k` is old agent `perm[k]`) and type
/// indices per agent by `type_perm[i]` (new index `s` is old index `type_perm[i][s]`).
fn relabel(inst: &Instance, perm: &[usize], type_perm: &[Vec<usize>]) -> Instance {
    let parts = inst.to_parts();
    let types = perm
        .iter()
        .map(|&old| {
            type_perm[old]
                .iter()
                .map(|&t| parts.types[old][t].clone())
                .collect()
        })
        .collect();
    let allocation = parts
        .allocation
        .iter()
        .map(|(profile, assigned)| {
            let new_profile = perm
                .iter()
                .map(|&old| {
                    type_perm[old]
                        .iter()
                        .position(|&t| t == profile[old])
                        .unwrap()
                })
                .collect();
            let new_assigned = perm.iter().map(|&old| assigned[old].clone()).collect();
            (new_profile, new_assigned)
        })
        .collect();
    Instance::from_parts(InstanceParts {
        types,
        allocation,
        ..parts
    })
    .unwrap()
}

fn flags(r: &ImplementabilityReport) -> (bool, bool, bool) {
    (
        r.ef_implementable,
        r.ic_implementable,
        r.ef_and_ic_implementable,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn arc_counts_follow_closed_forms(seed in any::<u64>()) {
        let inst = instance_from(seed);
        let g = build_graph(&inst);
        let sizes = inst.profile_space().sizes().to_vec();
        let m = sizes.len();
        let prod: usize = sizes.iter().product();
        let ic: usize = (0..m)
            .map(|i| prod / sizes[i] * sizes[i] * (sizes[i] - 1))
            .sum();
        prop_assert_eq!(g.vertex_count(), m * prod);
        prop_assert_eq!(g.count_of(ArcKind::Ef), prod * m * (m - 1));
        prop_assert_eq!(g.count_of(ArcKind::Ic), ic);
        prop_assert_eq!(ef_arc_count(inst.profile_space()), prod * m * (m - 1));
        prop_assert_eq!(ic_arc_count(inst.profile_space()), ic);
    }

    #[test]
    fn arcs_have_reverses_and_stay_in_their_component(seed in any::<u64>()) {
        let inst = instance_from(seed);
        let g = build_graph(&inst);
        let set: BTreeSet<(usize, usize, bool)> = g
            .arcs()
            .iter()
            .map(|a| (a.tail.0, a.head.0, a.kind == ArcKind::Ef))
            .collect();
        prop_assert_eq!(set.len(), g.arcs().len());
        for a in g.arcs() {
            prop_assert!(set.contains(&(a.head.0, a.tail.0, a.kind == ArcKind::Ef)));
            let (t, h) = (g.vertex(a.tail), g.vertex(a.head));
            match a.kind {
                ArcKind::Ef => {
                    prop_assert_eq!(&t.profile, &h.profile);
                    prop_assert!(t.agent != h.agent);
                }
                ArcKind::Ic => {
                    prop_assert_eq!(t.agent, h.agent);
                    let differ: Vec<usize> =
                        (0..t.profile.len()).filter(|&k| t.profile[k] != h.profile[k]).collect();
                    prop_assert_eq!(differ, vec![t.agent]);
                }
            }
        }
    }

    #[test]
    fn weights_recompute_exactly_from_values(seed in any::<u64>()) {
        let inst = instance_from(seed);
        let g = build_graph(&inst);
        let space = inst.profile_space();
        for a in g.arcs() {
            let (t, h) = (g.vertex(a.tail), g.vertex(a.head));
            let i = h.agent;
            let ti = h.profile[i];
            let bundle = |profile: &[usize], agent: usize| {
                let rank = space.rank(profile).unwrap();
                inst.bundles()[inst.assigned(rank, agent)].clone()
            };
            let own = inst.value_of(i, ti, &bundle(&h.profile, i)).unwrap();
            let other = match a.kind {
                ArcKind::Ef => inst.value_of(i, ti, &bundle(&h.profile, t.agent)).unwrap(),
                ArcKind::Ic => inst.value_of(i, ti, &bundle(&t.profile, i)).unwrap(),
            };
            prop_assert_eq!(a.weight, own - other);
        }
    }

    #[test]
    fn shifts_compose(seed in any::<u64>(), a in 0.0..2.0f64, b in 0.0..2.0f64, c in 0.0..2.0f64, d in 0.0..2.0f64) {
        let g = build_graph(&instance_from(seed));
        let twice = shift_graph(&shift_graph(&g, a, b).unwrap(), c, d).unwrap();
        let once = shift_graph(&g, a + c, b + d).unwrap();
        prop_assert_eq!(twice.arcs(), once.arcs());
        let zero = shift_graph(&g, 0.0, 0.0).unwrap();
        prop_assert_eq!(zero.arcs(), g.arcs());
        for (k, arc) in once.arcs().iter().enumerate() {
            let add = match arc.kind { ArcKind::Ef => a + c, ArcKind::Ic => b + d };
            prop_assert_eq!(arc.weight, g.base_weight(k) + add);
        }
        prop_assert!(shift_graph(&g, -a - 1e-3, b).is_err());
    }

    #[test]
    fn violation_report_is_translation_invariant(seed in any::<u64>(), c in quarter()) {
        let inst = instance_from(seed);
        let g = build_graph(&inst);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let p = PaymentTable::from_fn(&g, |_, _| rng.gen_range(-8..=8) as f64 * 0.25);
        let r = verify_payments(&inst, &p).unwrap();
        prop_assert_eq!(verify_payments(&inst, &p.translated(c)).unwrap(), r.clone());
        prop_assert!(r.max_ef_violation >= 0.0 && r.max_ic_violation >= 0.0);
    }

    #[test]
    fn classify_ignores_relabeling(seed in any::<u64>()) {
        let inst = instance_from(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed.rotate_left(17));
        let m = inst.num_agents();
        let mut perm: Vec<usize> = (0..m).collect();
        perm.shuffle(&mut rng);
        let type_perm: Vec<Vec<usize>> = inst
            .profile_space()
            .sizes()
            .iter()
            .map(|&n| {
                let mut p: Vec<usize> = (0..n).collect();
                p.shuffle(&mut rng);
                p
            })
            .collect();
        let other = relabel(&inst, &perm, &type_perm);
        prop_assert_eq!(flags(&classify(&inst)), flags(&classify(&other)));
    }

    #[test]
    fn per_agent_value_offsets_leave_weights_unchanged(seed in any::<u64>(), c in quarter(), agent in 0usize..3) {
        let inst = instance_from(seed);
        let agent = agent % inst.num_agents();
        let mut parts = inst.to_parts();
        for ty in &mut parts.types[agent] {
            for (_, v) in &mut ty.values {
                *v += c;
            }
        }
        let moved = Instance::from_parts(parts).unwrap();
        let (g0, g1) = (build_graph(&inst), build_graph(&moved));
        prop_assert_eq!(g0.arcs(), g1.arcs());
        prop_assert_eq!(flags(&classify(&inst)), flags(&classify(&moved)));
    }

    #[test]
    fn witnesses_reverify(seed in any::<u64>()) {
        let inst = instance_from(seed);
        let g = build_graph(&inst);
        let r = classify(&inst);
        prop_assert!(!r.ef_and_ic_implementable || (r.ef_implementable && r.ic_implementable));
        for filter in [ArcFilter::EfOnly, ArcFilter::IcOnly, ArcFilter::All] {
            if let Some(w) = find_negative_cycle(&g, filter) {
                prop_assert!(w.is_closed());
                prop_assert_eq!(w.n_ef + w.n_ic, w.len());
                let sum: f64 = w
                    .arcs
                    .iter()
                    .map(|a| inst.value_of_share(a.head.0 / inst.num_agents(), g.agent_of(a.head), g.agent_of(a.head))
                        - match a.kind {
                            ArcKind::Ef => inst.value_of_share(a.head.0 / inst.num_agents(), g.agent_of(a.head), g.agent_of(a.tail)),
                            ArcKind::Ic => {
                                let i = g.agent_of(a.head);
                                let t = inst.profile_space().coordinate(a.head.0 / inst.num_agents(), i);
                                inst.value(i, t, inst.assigned(a.tail.0 / inst.num_agents(), i))
                            }
                        })
                    .sum();
                prop_assert!((sum - w.total_weight).abs() <= 1e-12);
                prop_assert!(w.total_weight < -inst.tolerance());
                prop_assert!(w.arcs.iter().all(|a| filter.admits(a.kind)));
            }
        }
    }

    #[test]
    fn shifted_payments_meet_their_bounds(seed in any::<u64>(), x in 0.0..3.0f64, y in 0.0..3.0f64) {
        let inst = instance_from(seed);
        let g = build_graph(&inst);
        let tol = inst.tolerance();
        match approx_payments(&g, x, y) {
            Ok(p) => {
                let r = verify_payments(&inst, &p).unwrap();
                prop_assert!(r.max_ef_violation <= x + tol);
                prop_assert!(r.max_ic_violation <= y + tol);
                let own = verify_on_graph(&shift_graph(&g, x, y).unwrap(), &p).unwrap();
                prop_assert!(own.max_ef_violation <= tol && own.max_ic_violation <= tol);
            }
            Err(Error::NegativeCycle(w)) => prop_assert!(!is_cycle_correcting(&g, x, y).unwrap() && w.is_closed()),
            Err(e) => prop_assert!(false, "{}", e),
        }
    }

    #[test]
    fn cycle_correction_is_monotone(seed in any::<u64>(), x in 0.0..1.0f64, y in 0.0..1.0f64, dx in 0.0..1.0f64, dy in 0.0..1.0f64) {
        let g = build_graph(&instance_from(seed));
        if is_cycle_correcting(&g, x, y).unwrap() {
            prop_assert!(is_cycle_correcting(&g, x + dx, y + dy).unwrap());
        }
    }

    #[test]
    fn frontier_vertices_are_minimal(seed in any::<u64>()) {
        let inst = instance_from(seed);
        let g = build_graph(&inst);
        let f = pareto_frontier(&g);
        prop_assert!(f.complete);
        let eps = 100.0 * inst.tolerance();
        for w in f.vertices.windows(2) {
            prop_assert!(w[0].c_ef > w[1].c_ef && w[0].c_ic < w[1].c_ic);
        }
        for v in &f.vertices {
            prop_assert!(is_cycle_correcting(&g, v.c_ef + FRONTIER_TOLERANCE, v.c_ic + FRONTIER_TOLERANCE).unwrap());
            if v.c_ef > eps {
                prop_assert!(!is_cycle_correcting(&g, v.c_ef - eps, v.c_ic).unwrap());
            }
            if v.c_ic > eps {
                prop_assert!(!is_cycle_correcting(&g, v.c_ef, v.c_ic - eps).unwrap());
            }
        }
    }

    #[test]
    fn trusting_more_agents_keeps_their_protection(seed in any::<u64>(), mask in 0usize..8, extra in 0usize..3) {
        let inst = instance_from(seed);
        let m = inst.num_agents();
        let g = build_graph(&inst);
        let small = TrustPartition::new(m, (0..m).filter(|i| mask >> i & 1 == 1)).unwrap();
        let large = TrustPartition::new(m, small.trusted().into_iter().chain([extra % m])).unwrap();
        let kept = |part: &TrustPartition| -> BTreeSet<(usize, usize)> {
            prune_graph(&g, part)
                .arcs_of(ArcKind::Ef)
                .map(|a| (a.tail.0, a.head.0))
                .collect()
        };
        let before = kept(&small);
        let after = kept(&large);
        for arc in &before {
            prop_assert!(after.contains(arc));
        }
        let pruned = prune_graph(&g, &small);
        prop_assert_eq!(pruned.vertex_count(), g.vertex_count());
        for a in pruned.arcs() {
            let trusted = small.is_trusted(g.agent_of(a.head));
            prop_assert_eq!(a.kind == ArcKind::Ef, trusted);
        }
    }

    #[test]
    fn parts_round_trip(seed in any::<u64>()) {
        let inst = instance_from(seed);
        let back = Instance::from_parts(inst.to_parts()).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(back.to_parts(), inst.to_parts());
    }

    #[test]
    fn profile_space_ranks_round_trip(sizes in prop::collection::vec(1usize..5, 1..5)) {
        let space = ProfileSpace::new(sizes.clone());
        prop_assert_eq!(space.len(), sizes.iter().product::<usize>());
        let all: Vec<Profile> = space.iter().collect();
        prop_assert_eq!(all.len(), space.len());
        for (r, p) in all.iter().enumerate() {
            prop_assert_eq!(space.rank(p), Some(r));
            prop_assert_eq!(&space.unrank(r), p);
        }
        for w in all.windows(2) {
            prop_assert!(w[0] < w[1]);
        }
    }
}
