//! Randomized structural properties of the valuations, audits, replays, and
//! serialization, checked with proptest over small generated instances.

use std::collections::BTreeSet;

use num::{One, Signed, Zero};
use proptest::prelude::*;

use classfair::algorithms::build_guiding_plan;
use classfair::audit::{audit_cef, audit_cef1, audit_cmms, audit_usw, Alpha, PoolMode};
use classfair::frac::{fi, fr, Frac};
use classfair::harness::{run_instance, AlgorithmId, AlgorithmSpec, AuditKind, TiePolicy};
use classfair::jsonio::{instance_to_json, matching_to_json, parse_instance, parse_matching};
use classfair::oracles::{optimistic_value_dual, pessimistic_value_bruteforce, prop_share_oracle};
use classfair::valuation::{
    class_value, mms_share, optimistic_value, optimistic_value_items, pessimistic_value,
    prop_share, usw_opt,
};
use classfair::Instance;

/// Up to 3 classes of 1-3 agents each over up to 6 items, any edge pattern.
fn instance_strategy() -> impl Strategy<Value = Instance> {
    (1usize..=3, 0usize..=6)
        .prop_flat_map(|(k, n_items)| {
            (proptest::collection::vec(1usize..=3, k), Just(n_items))
        })
        .prop_flat_map(|(sizes, n_items)| {
            let n_agents: usize = sizes.iter().sum();
            (
                Just(sizes),
                Just(n_items),
                proptest::collection::vec(any::<bool>(), n_agents * n_items),
            )
        })
        .prop_map(|(sizes, n_items, edge_bits)| {
            let mut classes = Vec::with_capacity(sizes.len());
            let mut next = 0usize;
            for s in sizes {
                classes.push((next..next + s).collect::<Vec<_>>());
                next += s;
            }
            let mut edges = Vec::new();
            for a in 0..next {
                for o in 0..n_items {
                    if edge_bits[a * n_items + o] {
                        edges.push((a, o));
                    }
                }
            }
            Instance::new(classes, n_items, edges).expect("generated parts are valid")
        })
}

/// An instance plus one fractional bundle with quarter-step masses.
fn instance_with_bundles() -> impl Strategy<Value = (Instance, Vec<Frac>, Vec<Frac>)> {
    instance_strategy().prop_flat_map(|inst| {
        let n = inst.n_items();
        (
            Just(inst),
            proptest::collection::vec(0i64..=4, n),
            proptest::collection::vec(0i64..=4, n),
        )
            .prop_map(|(inst, b1, b2)| {
                let to_bundle = |v: Vec<i64>| v.into_iter().map(|m| fr(m, 4)).collect();
                (inst, to_bundle(b1), to_bundle(b2))
            })
    })
}

fn alpha_at_least(a: &Alpha, b: &Alpha) -> bool {
    match (a, b) {
        (Alpha::Infinite, _) => true,
        (_, Alpha::Infinite) => false,
        (Alpha::Finite(x), Alpha::Finite(y)) => x >= y,
    }
}

/// Replays one deterministic non-wasteful algorithm and returns its matching.
fn greedy_matching(inst: &Instance) -> classfair::FractionalMatching {
    let spec = AlgorithmSpec::plain(AlgorithmId::Greedy);
    run_instance(&spec, inst, 0, &[AuditKind::Nw]).expect("replay succeeds").matching
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn optimistic_value_is_monotone_and_concave((inst, b1, b2) in instance_with_bundles()) {
        for class in 0..inst.k() {
            let v1 = optimistic_value(&inst, class, &b1).unwrap();
            let v2 = optimistic_value(&inst, class, &b2).unwrap();

            let upper: Vec<Frac> =
                b1.iter().zip(&b2).map(|(x, y)| if x >= y { x.clone() } else { y.clone() }).collect();
            let vu = optimistic_value(&inst, class, &upper).unwrap();
            prop_assert!(vu >= v1 && vu >= v2, "raising bundle masses lowered the value");

            let mid: Vec<Frac> = b1.iter().zip(&b2).map(|(x, y)| (x + y) / fi(2)).collect();
            let vm = optimistic_value(&inst, class, &mid).unwrap();
            prop_assert!(
                &vm * fi(2) >= &v1 + &v2,
                "midpoint value {vm} under the average of {v1} and {v2}"
            );
        }
    }

    #[test]
    fn optimistic_value_agrees_with_its_dual_and_integral_forms((inst, b1, _b2) in instance_with_bundles()) {
        for class in 0..inst.k() {
            let fast = optimistic_value(&inst, class, &b1).unwrap();
            let dual = optimistic_value_dual(&inst, class, &b1).unwrap();
            prop_assert_eq!(&fast, &dual, "flow and dual oracles disagree");
        }
        // On a 0/1 bundle the value counts a maximum matching of the set.
        let set: BTreeSet<usize> =
            b1.iter().enumerate().filter(|(_, m)| **m >= fr(1, 2)).map(|(o, _)| o).collect();
        let indicator: Vec<Frac> = (0..inst.n_items())
            .map(|o| if set.contains(&o) { Frac::one() } else { Frac::zero() })
            .collect();
        for class in 0..inst.k() {
            let frac_value = optimistic_value(&inst, class, &indicator).unwrap();
            let int_value = optimistic_value_items(&inst, class, &set);
            prop_assert_eq!(frac_value, fi(int_value as i64));
        }
    }

    #[test]
    fn pessimistic_value_matches_bruteforce_and_never_exceeds_optimistic(inst in instance_strategy()) {
        let pool: BTreeSet<usize> = (0..inst.n_items()).collect();
        for class in 0..inst.k() {
            let pess = pessimistic_value(&inst, class, &pool).unwrap();
            let brute = pessimistic_value_bruteforce(&inst, class, &pool).unwrap();
            prop_assert_eq!(pess, brute, "minimum-maximal search and enumeration disagree");
            prop_assert!(pess <= optimistic_value_items(&inst, class, &pool));
        }
    }

    #[test]
    fn uniform_split_share_equals_the_partition_lp(inst in instance_strategy()) {
        let pool: BTreeSet<usize> = (0..inst.n_items()).collect();
        for class in 0..inst.k() {
            prop_assert_eq!(
                prop_share(&inst, class),
                prop_share_oracle(&inst, class, &pool).unwrap()
            );
        }
    }

    #[test]
    fn maximin_share_never_exceeds_the_divisible_share(inst in instance_strategy()) {
        let pool: BTreeSet<usize> = (0..inst.n_items()).collect();
        for class in 0..inst.k() {
            let mms = mms_share(&inst, class, &pool).unwrap();
            prop_assert!(
                fi(mms as i64) <= prop_share(&inst, class),
                "integral partition share exceeded the divisible one"
            );
        }
    }

    #[test]
    fn replays_are_deterministic_for_every_algorithm(inst in instance_strategy(), seed in any::<u64>()) {
        for id in [
            AlgorithmId::MatchAndShift,
            AlgorithmId::EqualFilling,
            AlgorithmId::EqualFillingOcs,
            AlgorithmId::EqualRanking,
            AlgorithmId::Greedy,
        ] {
            let mut spec = AlgorithmSpec::plain(id);
            spec.ties = TiePolicy::Seeded;
            let a = run_instance(&spec, &inst, seed, &[]).expect("replay succeeds").matching;
            let b = run_instance(&spec, &inst, seed, &[]).expect("replay succeeds").matching;
            prop_assert_eq!(a, b, "same seed produced different matchings for {:?}", id);
        }
    }

    #[test]
    fn non_wasteful_outputs_reach_half_of_optimal_welfare(inst in instance_strategy()) {
        for id in [AlgorithmId::MatchAndShift, AlgorithmId::EqualFilling, AlgorithmId::Greedy] {
            let m = run_instance(&AlgorithmSpec::plain(id), &inst, 0, &[])
                .expect("replay succeeds")
                .matching;
            let usw = audit_usw(&m, &inst);
            prop_assert!(&usw.achieved * fi(2) >= fi(usw.optimum as i64));
        }
    }

    #[test]
    fn matched_mass_splits_exactly_across_classes(inst in instance_strategy()) {
        let m = greedy_matching(&inst);
        let total: Frac = (0..inst.k()).map(|i| class_value(&m, &inst, i)).sum();
        prop_assert_eq!(total, m.total_mass());
        prop_assert_eq!(usw_opt(&inst) as i64 >= 0, true);
    }

    #[test]
    fn instances_and_matchings_round_trip_through_json(inst in instance_strategy()) {
        let parsed = parse_instance(&instance_to_json(&inst)).expect("emitted JSON parses");
        prop_assert_eq!(&parsed, &inst);
        let m = greedy_matching(&inst);
        let parsed = parse_matching(&matching_to_json(&m), &inst).expect("emitted JSON parses");
        prop_assert_eq!(parsed, m);
    }

    #[test]
    fn audit_alphas_are_invariant_under_class_relabeling(inst in instance_strategy()) {
        prop_assume!(inst.k() >= 2);
        let mut rotated = inst.classes().to_vec();
        rotated.rotate_left(1);
        let relabeled = Instance::new(rotated, inst.n_items(), inst_edges(&inst))
            .expect("rotated classes still partition the agents");
        let m = greedy_matching(&inst);
        prop_assert_eq!(
            audit_cef(&m, &inst).unwrap().alpha,
            audit_cef(&m, &relabeled).unwrap().alpha
        );
        prop_assert_eq!(
            audit_cef1(&m, &inst).unwrap().alpha,
            audit_cef1(&m, &relabeled).unwrap().alpha
        );
        prop_assert_eq!(
            audit_cmms(&m, &inst, PoolMode::AllItems).unwrap().alpha,
            audit_cmms(&m, &relabeled, PoolMode::AllItems).unwrap().alpha
        );
    }

    #[test]
    fn removing_an_item_never_hurts_the_envy_rating(inst in instance_strategy()) {
        let m = greedy_matching(&inst);
        let cef = audit_cef(&m, &inst).unwrap().alpha;
        let cef1 = audit_cef1(&m, &inst).unwrap().alpha;
        prop_assert!(
            alpha_at_least(&cef1, &cef),
            "up-to-one rating {} fell below the plain rating {}",
            cef1.render(),
            cef.render()
        );
    }

    #[test]
    fn guiding_plan_spends_one_unit_per_connected_item(inst in instance_strategy()) {
        let plan = build_guiding_plan(&inst);
        for item in 0..inst.n_items() {
            let step = &plan.steps[item];
            for (_, inc) in step {
                prop_assert!(inc.is_positive(), "guiding increments must be positive");
            }
            let spent: Frac = step.iter().map(|(_, inc)| inc.clone()).sum();
            if inst.item_neighbors(item).is_empty() {
                prop_assert!(spent.is_zero());
            } else {
                prop_assert_eq!(&spent, &Frac::one(), "item {} spent {}", item, spent);
            }
        }
        let mut totals = vec![Frac::zero(); inst.n_agents()];
        for step in &plan.steps {
            for (a, inc) in step {
                totals[*a] += inc;
            }
        }
        prop_assert_eq!(totals, plan.totals);
    }
}

/// The edge list of an instance, reconstructed from adjacency.
fn inst_edges(inst: &Instance) -> Vec<(usize, usize)> {
    (0..inst.n_agents())
        .flat_map(|a| inst.agent_items(a).iter().map(move |&o| (a, o)))
        .collect()
}
