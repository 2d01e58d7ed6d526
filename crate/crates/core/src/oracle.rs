//! Exhaustive search over every masked decision sequence.
//!
//! This is a verification oracle, not a solver: it replays every
//! `(job, agv)` sequence through the engine without pruning, so it is only
//! usable on tiny instances.

use thiserror::Error;

use crate::engine::{JointAction, ScheduleState};
use crate::instance::{Instance, Time};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    /// Maximum `n * (m + 1)`.
    pub max_decisions: usize,
    pub max_agvs: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_decisions: 8,
            max_agvs: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("instance exceeds oracle limits ({decisions} decisions, {agvs} AGVs; about {estimated_sequences:.3e} sequences)")]
pub struct OracleRefusal {
    pub decisions: usize,
    pub agvs: usize,
    pub estimated_sequences: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleSolution {
    pub makespan: Time,
    /// First optimal sequence in lexicographic `(job, agv)` order.
    pub witness: Vec<JointAction>,
    pub sequences_explored: u64,
}

/// Number of complete decision sequences: the multinomial count of job
/// interleavings times `k` choices per decision.
pub fn search_size(instance: &Instance) -> f64 {
    let per_job = instance.ops_per_job();
    let total = instance.total_operations();
    let ln_fact = |x: usize| (1..=x).map(|i| (i as f64).ln()).sum::<f64>();
    let ln = ln_fact(total) - instance.jobs() as f64 * ln_fact(per_job)
        + total as f64 * (instance.agvs() as f64).ln();
    ln.exp()
}

pub fn brute_force_oracle(instance: &Instance, limits: OracleLimits) -> Result<OracleSolution, OracleRefusal> {
    let decisions = instance.total_operations();
    if decisions > limits.max_decisions || instance.agvs() > limits.max_agvs {
        return Err(OracleRefusal {
            decisions,
            agvs: instance.agvs(),
            estimated_sequences: search_size(instance),
        });
    }
    let mut search = Search {
        best: None,
        explored: 0,
        path: Vec::with_capacity(decisions),
    };
    search.descend(ScheduleState::reset(instance));
    let (makespan, witness) = search.best.expect("every instance has a complete schedule");
    Ok(OracleSolution {
        makespan,
        witness,
        sequences_explored: search.explored,
    })
}

struct Search {
    best: Option<(Time, Vec<JointAction>)>,
    explored: u64,
    path: Vec<JointAction>,
}

impl Search {
    fn descend(&mut self, state: ScheduleState<'_>) {
        if state.is_terminal() {
            self.explored += 1;
            let makespan = state.makespan().expect("terminal");
            if self.best.as_ref().is_none_or(|(b, _)| makespan < *b) {
                self.best = Some((makespan, self.path.clone()));
            }
            return;
        }
        for job in state.valid_operations() {
            for agv in 0..state.instance().agvs() {
                let action = JointAction::new(job, agv);
                let mut next = state.clone();
                next.apply(action).expect("masked actions are feasible");
                self.path.push(action);
                self.descend(next);
                self.path.pop();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::replay;
    use crate::fixtures::{i1, i2};
    use crate::instance::{generate_instance, AgvCount, GenerationConfig};

    #[test]
    fn micro_instance_has_one_sequence() {
        let sol = brute_force_oracle(&i1(), OracleLimits::default()).unwrap();
        assert_eq!(sol.makespan, 10);
        assert_eq!(sol.witness, vec![JointAction::new(0, 0); 2]);
        assert_eq!(sol.sequences_explored, 1);
    }

    #[test]
    fn enumeration_count_matches_search_size() {
        let inst = i2();
        let sol = brute_force_oracle(&inst, OracleLimits::default()).unwrap();
        // C(6, 3) interleavings * 2^6 AGV choices.
        assert_eq!(sol.sequences_explored, 20 * 64);
        assert!((search_size(&inst) - 1280.0).abs() < 1e-6);
        assert_eq!(replay(&inst, &sol.witness).unwrap().makespan().unwrap(), sol.makespan);
    }

    #[test]
    fn two_jobs_one_machine_dominates_rules() {
        let inst = Instance::new(
            "2x1x1",
            0,
            1,
            vec![vec![0], vec![0]],
            vec![vec![3, 0], vec![3, 0]],
            vec![0, 2, 2, 2, 0, 2, 2, 2, 0],
        )
        .unwrap();
        let sol = brute_force_oracle(&inst, OracleLimits::default()).unwrap();
        for combo in crate::rules::RuleRegistry::default().combos() {
            assert!(sol.makespan <= combo.solve(&inst, 0).unwrap().makespan);
        }
    }

    #[test]
    fn refuses_large_instances() {
        let inst = generate_instance(&GenerationConfig::uniform(3, 3, AgvCount::Fixed(2), 0)).unwrap();
        let err = brute_force_oracle(&inst, OracleLimits::default()).unwrap_err();
        assert_eq!(err.decisions, 12);
        assert!(err.estimated_sequences > 1e6);
    }
}
