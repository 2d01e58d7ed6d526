mod common;

use common::{random_episode, random_instance};
use jsspt_core::engine::{replay, validate_schedule, JointAction, ScheduleState};
use jsspt_core::instance::Location;
use jsspt_core::oracle::{brute_force_oracle, OracleLimits};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1200))]

    #[test]
    fn random_episodes_are_valid(n in 1usize..=10, m in 1usize..=10, k in 1usize..=5, seed in any::<u64>(), walk in any::<u64>()) {
        let inst = random_instance(n, m, k, seed);
        let (state, actions) = random_episode(&inst, walk);
        prop_assert_eq!(actions.len(), n * (m + 1));
        let makespan = state.makespan().unwrap();
        prop_assert!(makespan >= inst.lower_bound());
        let result = state.into_result("random").unwrap();
        let violations = validate_schedule(&result, &inst);
        prop_assert!(violations.is_empty(), "{:?}", violations);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn clocks_are_monotone(n in 1usize..=8, m in 1usize..=6, k in 1usize..=4, seed in any::<u64>(), walk in any::<u64>()) {
        let inst = random_instance(n, m, k, seed);
        let mut state = ScheduleState::reset(&inst);
        let (_, actions) = random_episode(&inst, walk);
        let mut agv_idle = vec![0u64; k];
        for a in &actions {
            let t = state.apply(*a).unwrap();
            prop_assert!(t.transport_start <= t.transport_end);
            prop_assert!(t.transport_end <= t.start && t.start <= t.end);
            prop_assert!(t.transport_end >= agv_idle[a.agv]);
            agv_idle[a.agv] = t.transport_end;
        }
        for i in 0..m {
            let seq = state.sequence(Location::machine(i));
            let ends: Vec<u64> = seq.iter().map(|&(j, o)| state.times(j, o).unwrap().end).collect();
            prop_assert!(ends.windows(2).all(|w| w[0] < w[1]), "{:?}", ends);
        }
    }

    #[test]
    fn replay_is_deterministic(n in 1usize..=6, m in 1usize..=6, k in 1usize..=3, seed in any::<u64>(), walk in any::<u64>()) {
        let inst = random_instance(n, m, k, seed);
        let (state, actions) = random_episode(&inst, walk);
        let a = state.into_result("x").unwrap();
        let b = replay(&inst, &actions).unwrap().into_result("x").unwrap();
        prop_assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn instance_generation_is_deterministic(n in 1usize..=10, m in 1usize..=10, k in 1usize..=5, seed in any::<u64>()) {
        prop_assert_eq!(random_instance(n, m, k, seed).to_json(), random_instance(n, m, k, seed).to_json());
    }
}

fn enumerate_min(state: &ScheduleState<'_>) -> u64 {
    if state.is_terminal() {
        return state.makespan().unwrap();
    }
    let mut best = u64::MAX;
    for job in state.valid_operations() {
        for agv in state.compatible_agvs(job).unwrap() {
            let mut next = state.clone();
            next.apply(JointAction::new(job, agv)).unwrap();
            best = best.min(enumerate_min(&next));
        }
    }
    best
}

#[test]
fn oracle_matches_independent_enumeration() {
    for seed in 0..30 {
        for (n, m, k) in [(1, 1, 1), (1, 2, 2), (2, 1, 2), (2, 2, 1), (2, 2, 2)] {
            let inst = random_instance(n, m, k, seed);
            let sol = brute_force_oracle(&inst, OracleLimits { max_decisions: 6, max_agvs: 2 }).unwrap();
            assert_eq!(sol.makespan, enumerate_min(&ScheduleState::reset(&inst)), "{}", inst.id());
            assert_eq!(replay(&inst, &sol.witness).unwrap().makespan().unwrap(), sol.makespan);
        }
    }
}
