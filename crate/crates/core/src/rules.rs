//! Dispatching rules and their registry.
//!
//! Operation rules pick a job from the frontier; AGV rules pick a vehicle for
//! the chosen job. Both are trait objects looked up by name, and any pair
//! forms a combo solver identified as `<OPRULE>+<AGVRULE>`.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::engine::{ScheduleResult, ScheduleState};
use crate::error::{EngineError, PolicyError};
use crate::features::raw_agv_features;
use crate::instance::{Instance, Time};
use crate::policy::{run_episode, Policy};

/// Random stream shared by both rules of one episode.
pub type SolverRng = ChaCha8Rng;

pub fn solver_rng(seed: u64) -> SolverRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub trait OperationRule: Send + Sync {
    fn name(&self) -> &'static str;

    /// Picks a job whose next operation is scheduled next.
    fn select(&self, state: &ScheduleState<'_>, rng: &mut SolverRng) -> Result<usize, EngineError>;
}

pub trait AgvRule: Send + Sync {
    fn name(&self) -> &'static str;

    /// Picks the AGV that transports the next operation of `job`.
    fn select(&self, state: &ScheduleState<'_>, job: usize, rng: &mut SolverRng) -> Result<usize, EngineError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Direction {
    Min,
    Max,
}

/// First index with the best score; later candidates must be strictly better.
fn arg_best<I: IntoIterator<Item = (usize, f64)>>(items: I, direction: Direction) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (idx, score) in items {
        let better = match best {
            None => true,
            Some((_, b)) => match direction {
                Direction::Min => score < b,
                Direction::Max => score > b,
            },
        };
        if better {
            best = Some((idx, score));
        }
    }
    best.map(|(idx, _)| idx)
}

type Score = fn(&ScheduleState<'_>, usize, usize) -> f64;

/// A rule that ranks each frontier job by a score of its next operation.
struct PriorityRule {
    name: &'static str,
    direction: Direction,
    score: Score,
}

impl OperationRule for PriorityRule {
    fn name(&self) -> &'static str {
        self.name
    }

    fn select(&self, state: &ScheduleState<'_>, _rng: &mut SolverRng) -> Result<usize, EngineError> {
        let frontier = state.valid_operations();
        arg_best(
            frontier.iter().map(|&j| (j, (self.score)(state, j, state.next_operation(j)))),
            self.direction,
        )
        .ok_or(EngineError::Terminal)
    }
}

struct RandomOperation;

impl OperationRule for RandomOperation {
    fn name(&self) -> &'static str {
        "RANDOM"
    }

    fn select(&self, state: &ScheduleState<'_>, rng: &mut SolverRng) -> Result<usize, EngineError> {
        let frontier = state.valid_operations();
        if frontier.is_empty() {
            return Err(EngineError::Terminal);
        }
        Ok(frontier[rng.random_range(0..frontier.len())])
    }
}

fn remaining_work(state: &ScheduleState<'_>, job: usize, op: usize) -> Time {
    let inst = state.instance();
    (op..inst.ops_per_job()).map(|i| inst.proc_time(job, i)).sum()
}

fn spt(state: &ScheduleState<'_>, job: usize, op: usize) -> f64 {
    state.instance().proc_time(job, op) as f64
}

/// Mean over the job's remaining processing operations; 0 once only the
/// unload release is left.
fn smpt(state: &ScheduleState<'_>, job: usize, op: usize) -> f64 {
    let m = state.instance().machines();
    if op >= m {
        return 0.0;
    }
    remaining_work(state, job, op) as f64 / (m - op) as f64
}

fn work_remaining(state: &ScheduleState<'_>, job: usize, op: usize) -> f64 {
    remaining_work(state, job, op) as f64
}

/// Flow due date through the candidate over the work remaining.
fn fdd_over_mwr(state: &ScheduleState<'_>, job: usize, op: usize) -> f64 {
    let inst = state.instance();
    let flow: Time = (0..=op).map(|i| inst.proc_time(job, i)).sum();
    let remaining = remaining_work(state, job, op);
    if remaining == 0 {
        f64::INFINITY
    } else {
        flow as f64 / remaining as f64
    }
}

fn ops_remaining(state: &ScheduleState<'_>, _job: usize, op: usize) -> f64 {
    (state.instance().ops_per_job() - op) as f64
}

fn ready_time(state: &ScheduleState<'_>, job: usize, op: usize) -> f64 {
    state.ready_time(job, op) as f64
}

/// The ten operation rules in their canonical order.
pub fn builtin_operation_rules() -> Vec<Arc<dyn OperationRule>> {
    let rule = |name, direction, score: Score| -> Arc<dyn OperationRule> {
        Arc::new(PriorityRule {
            name,
            direction,
            score,
        })
    };
    vec![
        rule("SPT", Direction::Min, spt),
        rule("SMPT", Direction::Min, smpt),
        rule("LPT", Direction::Max, spt),
        rule("MWR", Direction::Max, work_remaining),
        rule("LWR", Direction::Min, work_remaining),
        rule("FDD/MWR", Direction::Min, fdd_over_mwr),
        rule("MOR", Direction::Max, ops_remaining),
        rule("LOR", Direction::Min, ops_remaining),
        Arc::new(RandomOperation),
        rule("FCFS", Direction::Min, ready_time),
    ]
}

type AgvScore = fn(&crate::features::RawAgvFeatures) -> Time;

/// Argmin over one raw AGV feature.
struct EarliestAgv {
    name: &'static str,
    feature: AgvScore,
}

impl AgvRule for EarliestAgv {
    fn name(&self) -> &'static str {
        self.name
    }

    fn select(&self, state: &ScheduleState<'_>, job: usize, _rng: &mut SolverRng) -> Result<usize, EngineError> {
        let raw = raw_agv_features(state, job)?;
        Ok(arg_best(raw.iter().enumerate().map(|(u, f)| (u, (self.feature)(f) as f64)), Direction::Min)
            .expect("fleet is never empty"))
    }
}

struct RandomAgv;

impl AgvRule for RandomAgv {
    fn name(&self) -> &'static str {
        "RANDOM"
    }

    fn select(&self, state: &ScheduleState<'_>, job: usize, rng: &mut SolverRng) -> Result<usize, EngineError> {
        let fleet = state.compatible_agvs(job)?;
        Ok(fleet[rng.random_range(0..fleet.len())])
    }
}

/// The four AGV rules in their canonical order.
pub fn builtin_agv_rules() -> Vec<Arc<dyn AgvRule>> {
    vec![
        Arc::new(RandomAgv),
        // earliest arrival at the pick-up machine
        Arc::new(EarliestAgv {
            name: "SPUT",
            feature: |f| f.eat,
        }),
        // earliest completion of the transport task
        Arc::new(EarliestAgv {
            name: "SCTA",
            feature: |f| f.eft,
        }),
        // earliest release from pending tasks
        Arc::new(EarliestAgv {
            name: "SCPT",
            feature: |f| f.ert,
        }),
    ]
}

/// An operation rule paired with an AGV rule.
#[derive(Clone)]
pub struct ComboSolver {
    op_rule: Arc<dyn OperationRule>,
    agv_rule: Arc<dyn AgvRule>,
}

impl ComboSolver {
    pub fn new(op_rule: Arc<dyn OperationRule>, agv_rule: Arc<dyn AgvRule>) -> Self {
        ComboSolver { op_rule, agv_rule }
    }

    pub fn id(&self) -> String {
        format!("{}+{}", self.op_rule.name(), self.agv_rule.name())
    }

    pub fn operation_rule(&self) -> &Arc<dyn OperationRule> {
        &self.op_rule
    }

    pub fn agv_rule(&self) -> &Arc<dyn AgvRule> {
        &self.agv_rule
    }

    /// Runs one episode to completion. RANDOM rules draw from a stream
    /// seeded with `seed`.
    pub fn solve(&self, instance: &Instance, seed: u64) -> Result<ScheduleResult, PolicyError> {
        let mut policy = self.clone();
        let trace = run_episode(instance, &mut policy, seed, crate::engine::DEFAULT_REWARD_SCALE)?;
        Ok(trace.result)
    }
}

impl fmt::Debug for ComboSolver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("ComboSolver").field(&self.id()).finish()
    }
}

impl Policy for ComboSolver {
    fn id(&self) -> String {
        ComboSolver::id(self)
    }

    fn choose_operation(&mut self, state: &ScheduleState<'_>, rng: &mut SolverRng) -> Result<usize, PolicyError> {
        Ok(self.op_rule.select(state, rng)?)
    }

    fn choose_agv(&mut self, state: &ScheduleState<'_>, job: usize, rng: &mut SolverRng) -> Result<usize, PolicyError> {
        Ok(self.agv_rule.select(state, job, rng)?)
    }
}

/// Name-indexed rule sets. Registration order is preserved and defines the
/// order of [`RuleRegistry::combos`].
#[derive(Clone)]
pub struct RuleRegistry {
    operation: Vec<Arc<dyn OperationRule>>,
    agv: Vec<Arc<dyn AgvRule>>,
}

impl Default for RuleRegistry {
    fn default() -> Self {
        RuleRegistry {
            operation: builtin_operation_rules(),
            agv: builtin_agv_rules(),
        }
    }
}

impl RuleRegistry {
    pub fn empty() -> Self {
        RuleRegistry {
            operation: Vec::new(),
            agv: Vec::new(),
        }
    }

    /// Adds or replaces an operation rule by name.
    pub fn register_operation(&mut self, rule: Arc<dyn OperationRule>) {
        match self.operation.iter().position(|r| r.name() == rule.name()) {
            Some(i) => self.operation[i] = rule,
            None => self.operation.push(rule),
        }
    }

    pub fn register_agv(&mut self, rule: Arc<dyn AgvRule>) {
        match self.agv.iter().position(|r| r.name() == rule.name()) {
            Some(i) => self.agv[i] = rule,
            None => self.agv.push(rule),
        }
    }

    pub fn operation_rules(&self) -> &[Arc<dyn OperationRule>] {
        &self.operation
    }

    pub fn agv_rules(&self) -> &[Arc<dyn AgvRule>] {
        &self.agv
    }

    pub fn operation(&self, name: &str) -> Option<Arc<dyn OperationRule>> {
        self.operation.iter().find(|r| r.name().eq_ignore_ascii_case(name)).cloned()
    }

    pub fn agv(&self, name: &str) -> Option<Arc<dyn AgvRule>> {
        self.agv.iter().find(|r| r.name().eq_ignore_ascii_case(name)).cloned()
    }

    /// Resolves `<OPRULE>+<AGVRULE>`.
    pub fn combo(&self, id: &str) -> Result<ComboSolver, PolicyError> {
        let unknown = || PolicyError::UnknownSolver(id.to_string());
        let (op, agv) = id.rsplit_once('+').ok_or_else(unknown)?;
        Ok(ComboSolver::new(
            self.operation(op.trim()).ok_or_else(unknown)?,
            self.agv(agv.trim()).ok_or_else(unknown)?,
        ))
    }

    /// Every operation rule crossed with every AGV rule, operation-major.
    pub fn combos(&self) -> Vec<ComboSolver> {
        self.operation
            .iter()
            .flat_map(|op| self.agv.iter().map(move |agv| ComboSolver::new(op.clone(), agv.clone())))
            .collect()
    }
}

/// Solves `instance` with a named operation rule and AGV rule.
pub fn solve(instance: &Instance, op_rule: &str, agv_rule: &str, seed: u64) -> Result<ScheduleResult, PolicyError> {
    RuleRegistry::default()
        .combo(&format!("{op_rule}+{agv_rule}"))?
        .solve(instance, seed)
}

#[derive(Debug, Clone)]
pub struct ComboReport {
    pub results: Vec<ScheduleResult>,
    /// Index into `results` of the first combo reaching the minimum makespan.
    pub best: usize,
}

impl ComboReport {
    pub fn best_result(&self) -> &ScheduleResult {
        &self.results[self.best]
    }
}

/// Runs all registered combos on one instance.
pub fn solve_all_combos(registry: &RuleRegistry, instance: &Instance, seed: u64) -> Result<ComboReport, PolicyError> {
    let results = registry
        .combos()
        .iter()
        .map(|c| c.solve(instance, seed))
        .collect::<Result<Vec<_>, _>>()?;
    let best = arg_best(results.iter().enumerate().map(|(i, r)| (i, r.makespan as f64)), Direction::Min)
        .ok_or_else(|| PolicyError::UnknownSolver("no combos registered".into()))?;
    Ok(ComboReport { results, best })
}
