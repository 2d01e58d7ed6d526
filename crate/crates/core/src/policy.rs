//! Episode runner for pluggable decision makers.

use std::time::{Duration, Instant};

use crate::engine::{JointAction, ScheduleResult, ScheduleState};
use crate::error::PolicyError;
use crate::instance::{Instance, Time};
use crate::rules::{solver_rng, SolverRng};

/// Makes both halves of each joint decision. The AGV choice is always asked
/// for after, and conditioned on, the operation choice of the same step.
pub trait Policy {
    /// Solver identifier written to result rows.
    fn id(&self) -> String;

    fn begin(&mut self, _instance: &Instance, _seed: u64) -> Result<(), PolicyError> {
        Ok(())
    }

    fn choose_operation(&mut self, state: &ScheduleState<'_>, rng: &mut SolverRng) -> Result<usize, PolicyError>;

    fn choose_agv(&mut self, state: &ScheduleState<'_>, job: usize, rng: &mut SolverRng) -> Result<usize, PolicyError>;

    /// Called once with the terminal outcome of a completed episode.
    fn finish(&mut self, _makespan: Time, _reward: f64) -> Result<(), PolicyError> {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepRecord {
    /// FNV-1a digest of the decision-relevant state before the step.
    pub observation_digest: u64,
    pub job: usize,
    pub agv: usize,
}

#[derive(Debug, Clone)]
pub struct EpisodeTrace {
    pub steps: Vec<StepRecord>,
    pub reward: f64,
    pub makespan: Time,
    pub wall_time: Duration,
    pub result: ScheduleResult,
}

struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }

    fn write(&mut self, value: u64) {
        for byte in value.to_le_bytes() {
            self.0 ^= byte as u64;
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }

    fn finish(&self) -> u64 {
        self.0
    }
}

pub fn state_digest(state: &ScheduleState<'_>) -> u64 {
    let inst = state.instance();
    let mut h = Fnv::new();
    h.write(state.step() as u64);
    for j in 0..inst.jobs() {
        h.write(state.next_operation(j) as u64);
    }
    for agv in state.agv_statuses() {
        h.write(agv.location.0 as u64);
        h.write(agv.idle);
    }
    for l in 0..inst.locations() {
        h.write(state.machine_available(crate::instance::Location(l)));
    }
    h.finish()
}

/// Runs `policy` on `instance` until the schedule is complete.
///
/// Choices outside the current mask abort the episode with a protocol
/// error; nothing is returned for an aborted episode.
pub fn run_episode(
    instance: &Instance,
    policy: &mut dyn Policy,
    seed: u64,
    reward_scale: f64,
) -> Result<EpisodeTrace, PolicyError> {
    let started = Instant::now();
    let mut rng = solver_rng(seed);
    let mut state = ScheduleState::reset(instance);
    let mut steps = Vec::with_capacity(instance.total_operations());
    policy.begin(instance, seed)?;

    while !state.is_terminal() {
        let digest = state_digest(&state);
        let job = policy.choose_operation(&state, &mut rng)?;
        if !state.valid_operations().contains(&job) {
            return Err(PolicyError::Protocol(format!(
                "step {}: job {job} is masked",
                state.step()
            )));
        }
        let agv = policy.choose_agv(&state, job, &mut rng)?;
        if !state.compatible_agvs(job)?.contains(&agv) {
            return Err(PolicyError::Protocol(format!(
                "step {}: AGV {agv} is not available for job {job}",
                state.step()
            )));
        }
        state.apply(JointAction::new(job, agv))?;
        steps.push(StepRecord {
            observation_digest: digest,
            job,
            agv,
        });
    }

    let makespan = state.makespan()?;
    let reward = state.terminal_reward(reward_scale);
    policy.finish(makespan, reward)?;
    let result = state.into_result(policy.id())?;
    Ok(EpisodeTrace {
        steps,
        reward,
        makespan,
        wall_time: started.elapsed(),
        result,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{i1, i2};
    use crate::rules::RuleRegistry;

    #[test]
    fn micro_episode() {
        let inst = i1();
        let mut combo = RuleRegistry::default().combo("SPT+SCTA").unwrap();
        let trace = run_episode(&inst, &mut combo, 0, 5.0).unwrap();
        assert_eq!(trace.steps.len(), 2);
        assert!((trace.reward + 0.2).abs() < 1e-12);
        assert_eq!(trace.makespan, 10);
        assert_eq!(trace.result.solver, "SPT+SCTA");
    }

    struct Stubborn;

    impl Policy for Stubborn {
        fn id(&self) -> String {
            "stubborn".into()
        }
        fn choose_operation(&mut self, _: &ScheduleState<'_>, _: &mut SolverRng) -> Result<usize, PolicyError> {
            Ok(0)
        }
        fn choose_agv(&mut self, _: &ScheduleState<'_>, _: usize, _: &mut SolverRng) -> Result<usize, PolicyError> {
            Ok(0)
        }
    }

    #[test]
    fn masked_choice_aborts() {
        // Job 0 finishes after 3 steps; the 4th request for it is masked.
        let inst = i2();
        let err = run_episode(&inst, &mut Stubborn, 0, 5.0).unwrap_err();
        assert!(matches!(err, PolicyError::Protocol(_)), "{err}");
    }

    #[test]
    fn episode_length_and_reward() {
        let inst = i2();
        for combo in RuleRegistry::default().combos() {
            let mut policy = combo.clone();
            let trace = run_episode(&inst, &mut policy, 1, 5.0).unwrap();
            assert_eq!(trace.steps.len(), inst.total_operations());
            let expected = -(trace.makespan as f64) / (inst.lower_bound() as f64 * 5.0);
            assert!((trace.reward - expected).abs() < 1e-12);
        }
    }
}
