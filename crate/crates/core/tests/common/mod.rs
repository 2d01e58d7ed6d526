#![allow(dead_code)]

use jsspt_core::engine::{JointAction, ScheduleState};
use jsspt_core::instance::{generate_instance, AgvCount, GenerationConfig, Instance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_instance(n: usize, m: usize, k: usize, seed: u64) -> Instance {
    generate_instance(&GenerationConfig::uniform(n, m, AgvCount::Fixed(k), seed)).unwrap()
}

/// Applies uniformly random masked actions until the schedule is complete.
pub fn random_episode(instance: &Instance, seed: u64) -> (ScheduleState<'_>, Vec<JointAction>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = ScheduleState::reset(instance);
    let mut actions = Vec::new();
    while !state.is_terminal() {
        let frontier = state.valid_operations();
        let job = frontier[rng.random_range(0..frontier.len())];
        let agv = rng.random_range(0..instance.agvs());
        let action = JointAction::new(job, agv);
        state.apply(action).unwrap();
        actions.push(action);
    }
    (state, actions)
}
