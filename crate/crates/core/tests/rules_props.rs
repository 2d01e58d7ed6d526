mod common;

use common::random_instance;
use jsspt_core::engine::{replay, validate_schedule};
use jsspt_core::fixtures::i2;
use jsspt_core::oracle::{brute_force_oracle, OracleLimits};
use jsspt_core::rules::{builtin_agv_rules, builtin_operation_rules, solve_all_combos, RuleRegistry};
use proptest::prelude::*;

#[test]
fn registry_sizes() {
    assert_eq!(builtin_operation_rules().len(), 10);
    assert_eq!(builtin_agv_rules().len(), 4);
    let combos = RuleRegistry::default().combos();
    assert_eq!(combos.len(), 40);
    assert_eq!(combos[0].id(), "SPT+RANDOM");
}

#[test]
fn random_combo_is_valid_across_seeds() {
    let inst = random_instance(5, 4, 2, 3);
    let combo = RuleRegistry::default().combo("RANDOM+RANDOM").unwrap();
    for seed in 0..100 {
        let result = combo.solve(&inst, seed).unwrap();
        assert!(result.makespan >= inst.lower_bound());
        assert!(validate_schedule(&result, &inst).is_empty());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn every_combo_replays_and_validates(n in 1usize..=6, m in 1usize..=5, k in 1usize..=3, seed in any::<u64>(), rseed in any::<u64>()) {
        let inst = random_instance(n, m, k, seed);
        let report = solve_all_combos(&RuleRegistry::default(), &inst, rseed).unwrap();
        for r in &report.results {
            prop_assert!(validate_schedule(r, &inst).is_empty());
            let replayed = replay(&inst, &r.decisions).unwrap().into_result(r.solver.clone()).unwrap();
            prop_assert_eq!(&replayed, r);
            prop_assert!(report.best_result().makespan <= r.makespan);
        }
    }

    #[test]
    fn rules_are_seed_deterministic(seed in any::<u64>(), rseed in any::<u64>()) {
        let inst = random_instance(4, 3, 2, seed);
        for combo in RuleRegistry::default().combos() {
            prop_assert_eq!(combo.solve(&inst, rseed).unwrap(), combo.solve(&inst, rseed).unwrap());
        }
    }
}

#[test]
fn combos_never_beat_the_oracle() {
    let mut some_optimal = 0;
    let mut instances = vec![i2()];
    for seed in 0..20 {
        instances.push(random_instance(2, 2, 2, seed));
    }
    for inst in &instances {
        let opt = brute_force_oracle(inst, OracleLimits::default()).unwrap().makespan;
        let best = solve_all_combos(&RuleRegistry::default(), inst, 0).unwrap().best_result().makespan;
        assert!(best >= opt);
        some_optimal += usize::from(best == opt);
    }
    println!("combo optimum reached on {some_optimal}/{} instances", instances.len());
}
