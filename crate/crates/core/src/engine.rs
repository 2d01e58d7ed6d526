//! Construction-style JSSPT environment.
//!
//! Each decision picks a job (its next operation) and an AGV. The engine
//! schedules the transport and the processing at their earliest feasible
//! times, so every schedule it produces is semi-active. Machine sequences
//! are append-only in decision order.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::EngineError;
use crate::instance::{Instance, Location, Time};

/// Default reward scaling factor.
pub const DEFAULT_REWARD_SCALE: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JointAction {
    pub job: usize,
    pub agv: usize,
}

impl JointAction {
    pub fn new(job: usize, agv: usize) -> Self {
        JointAction { job, agv }
    }
}

/// Times of one scheduled operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperationTimes {
    pub agv: usize,
    pub transport_start: Time,
    pub transport_end: Time,
    pub start: Time,
    pub end: Time,
}

/// Where an AGV will be, and from when, once its pending tasks are done.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AgvStatus {
    pub location: Location,
    pub idle: Time,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleState<'a> {
    instance: &'a Instance,
    next_op: Vec<usize>,
    times: Vec<Option<OperationTimes>>,
    /// Operations assigned per location, in decision order. Load stays empty.
    sequences: Vec<Vec<(usize, usize)>>,
    available: Vec<Time>,
    agvs: Vec<AgvStatus>,
    trace: Vec<JointAction>,
}

impl<'a> ScheduleState<'a> {
    /// Empty schedule: every AGV parked at the load machine at time 0.
    pub fn reset(instance: &'a Instance) -> Self {
        ScheduleState {
            instance,
            next_op: vec![0; instance.jobs()],
            times: vec![None; instance.total_operations()],
            sequences: vec![Vec::new(); instance.locations()],
            available: vec![0; instance.locations()],
            agvs: vec![
                AgvStatus {
                    location: Location::LOAD,
                    idle: 0,
                };
                instance.agvs()
            ],
            trace: Vec::with_capacity(instance.total_operations()),
        }
    }

    pub fn instance(&self) -> &'a Instance {
        self.instance
    }

    /// Number of decisions applied so far.
    pub fn step(&self) -> usize {
        self.trace.len()
    }

    pub fn is_terminal(&self) -> bool {
        self.trace.len() == self.instance.total_operations()
    }

    pub fn trace(&self) -> &[JointAction] {
        &self.trace
    }

    /// Index of the next unscheduled operation of `job` (`m + 1` when done).
    pub fn next_operation(&self, job: usize) -> usize {
        self.next_op[job]
    }

    pub fn agv(&self, agv: usize) -> AgvStatus {
        self.agvs[agv]
    }

    pub fn agv_statuses(&self) -> &[AgvStatus] {
        &self.agvs
    }

    /// Operations scheduled at `location`, in sequence order.
    pub fn sequence(&self, location: Location) -> &[(usize, usize)] {
        &self.sequences[location.0]
    }

    /// Completion of the last operation sequenced at `location` (0 if none).
    pub fn machine_available(&self, location: Location) -> Time {
        self.available[location.0]
    }

    pub fn times(&self, job: usize, op: usize) -> Option<OperationTimes> {
        self.times[job * self.instance.ops_per_job() + op]
    }

    pub fn is_scheduled(&self, job: usize, op: usize) -> bool {
        op < self.next_op[job]
    }

    /// Completion time of the predecessor of `op` (`0` for the first one).
    pub fn ready_time(&self, job: usize, op: usize) -> Time {
        if op == 0 {
            0
        } else {
            self.times(job, op - 1).map_or(0, |t| t.end)
        }
    }

    /// Jobs with an unscheduled operation, ascending.
    pub fn valid_operations(&self) -> Vec<usize> {
        let ops = self.instance.ops_per_job();
        (0..self.instance.jobs()).filter(|&j| self.next_op[j] < ops).collect()
    }

    /// Every AGV can serve every operation.
    pub fn compatible_agvs(&self, job: usize) -> Result<Vec<usize>, EngineError> {
        self.check_job(job)?;
        Ok((0..self.instance.agvs()).collect())
    }

    pub(crate) fn check_job(&self, job: usize) -> Result<usize, EngineError> {
        if job >= self.instance.jobs() {
            return Err(EngineError::UnknownJob(job));
        }
        let op = self.next_op[job];
        if op >= self.instance.ops_per_job() {
            return Err(EngineError::JobFinished(job));
        }
        Ok(op)
    }

    fn check(&self, action: JointAction) -> Result<usize, EngineError> {
        let op = self.check_job(action.job)?;
        if action.agv >= self.instance.agvs() {
            return Err(EngineError::UnknownAgv {
                agv: action.agv,
                fleet: self.instance.agvs(),
            });
        }
        Ok(op)
    }

    /// Times the operation would receive if `action` were applied now.
    pub fn preview(&self, action: JointAction) -> Result<OperationTimes, EngineError> {
        let op = self.check(action)?;
        let inst = self.instance;
        let (job, agv) = (action.job, action.agv);
        let source = inst.source_of(job, op);
        let target = inst.location_of(job, op);
        let vehicle = self.agvs[agv];
        let transport_start =
            self.ready_time(job, op).max(vehicle.idle + inst.travel(vehicle.location, source));
        let transport_end = transport_start + inst.travel(source, target);
        let (start, end) = if target.is_processing() {
            let start = transport_end.max(self.available[target.0]);
            (start, start + inst.proc_time(job, op))
        } else {
            (transport_end, transport_end)
        };
        Ok(OperationTimes {
            agv,
            transport_start,
            transport_end,
            start,
            end,
        })
    }

    /// Applies a joint action. On error the state is left untouched.
    pub fn apply(&mut self, action: JointAction) -> Result<OperationTimes, EngineError> {
        let times = self.preview(action)?;
        let inst = self.instance;
        let job = action.job;
        let op = self.next_op[job];
        let target = inst.location_of(job, op);

        self.times[job * inst.ops_per_job() + op] = Some(times);
        self.sequences[target.0].push((job, op));
        self.available[target.0] = self.available[target.0].max(times.end);
        self.agvs[action.agv] = AgvStatus {
            location: target,
            idle: times.transport_end,
        };
        self.next_op[job] += 1;
        self.trace.push(action);
        Ok(times)
    }

    /// Maximum completion at the unload machine.
    pub fn makespan(&self) -> Result<Time, EngineError> {
        if !self.is_terminal() {
            return Err(EngineError::NotTerminal {
                scheduled: self.step(),
                total: self.instance.total_operations(),
            });
        }
        let last = self.instance.machines();
        Ok((0..self.instance.jobs())
            .filter_map(|j| self.times(j, last))
            .map(|t| t.end)
            .max()
            .unwrap_or(0))
    }

    /// `-C_max / (LB * scale)` on a complete schedule, `0` otherwise.
    pub fn terminal_reward(&self, scale: f64) -> f64 {
        match self.makespan() {
            Ok(makespan) => -(makespan as f64) / (self.instance.lower_bound() as f64 * scale),
            Err(_) => 0.0,
        }
    }

    pub fn into_result(self, solver: impl Into<String>) -> Result<ScheduleResult, EngineError> {
        let makespan = self.makespan()?;
        let inst = self.instance;
        let mut operations = Vec::with_capacity(inst.total_operations());
        for job in 0..inst.jobs() {
            for op in 0..inst.ops_per_job() {
                let t = self.times(job, op).expect("terminal state schedules every operation");
                operations.push(OperationRecord {
                    job,
                    op,
                    machine: inst.location_of(job, op).0,
                    agv: t.agv,
                    transport_start: t.transport_start,
                    transport_end: t.transport_end,
                    start: t.start,
                    end: t.end,
                });
            }
        }
        Ok(ScheduleResult {
            instance_id: inst.id().to_string(),
            solver: solver.into(),
            makespan,
            operations,
            decisions: self.trace,
        })
    }
}

/// Replays a decision sequence from the empty schedule.
pub fn replay<'a>(
    instance: &'a Instance,
    decisions: &[JointAction],
) -> Result<ScheduleState<'a>, EngineError> {
    let mut state = ScheduleState::reset(instance);
    for &action in decisions {
        state.apply(action)?;
    }
    Ok(state)
}

/// One row of a schedule document. `machine` is a location index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperationRecord {
    pub job: usize,
    pub op: usize,
    pub machine: usize,
    pub agv: usize,
    pub transport_start: Time,
    pub transport_end: Time,
    pub start: Time,
    pub end: Time,
}

/// A complete schedule with its provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleResult {
    pub instance_id: String,
    pub solver: String,
    pub makespan: Time,
    /// Job-major, operation-minor.
    pub operations: Vec<OperationRecord>,
    pub decisions: Vec<JointAction>,
}

impl ScheduleResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedule document serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn operation(&self, job: usize, op: usize) -> Option<&OperationRecord> {
        self.operations.iter().find(|r| r.job == job && r.op == op)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Structure(String),
    ProcessingDuration { job: usize, op: usize },
    TransportDuration { job: usize, op: usize },
    JobPrecedence { job: usize, op: usize },
    TransportPrecedence { job: usize, op: usize },
    MachineOverlap { machine: usize, first: (usize, usize), second: (usize, usize) },
    AgvOverlap { agv: usize, first: (usize, usize), second: (usize, usize) },
    NotSemiActive { job: usize, op: usize },
    Makespan { reported: Time, actual: Time },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Structure(msg) => write!(f, "structure: {msg}"),
            Violation::ProcessingDuration { job, op } => {
                write!(f, "({job}, {op}): end != start + processing time")
            }
            Violation::TransportDuration { job, op } => {
                write!(f, "({job}, {op}): transport end != transport start + travel time")
            }
            Violation::JobPrecedence { job, op } => {
                write!(f, "({job}, {op}): transport starts before predecessor completes")
            }
            Violation::TransportPrecedence { job, op } => {
                write!(f, "({job}, {op}): processing starts before delivery")
            }
            Violation::MachineOverlap { machine, first, second } => {
                write!(f, "location {machine}: {first:?} overlaps {second:?}")
            }
            Violation::AgvOverlap { agv, first, second } => {
                write!(f, "AGV {agv}: task {second:?} starts before it can follow {first:?}")
            }
            Violation::NotSemiActive { job, op } => {
                write!(f, "({job}, {op}): not scheduled at its earliest feasible time")
            }
            Violation::Makespan { reported, actual } => {
                write!(f, "makespan {reported} reported, schedule gives {actual}")
            }
        }
    }
}

/// Checks a schedule against the instance from its rows alone. An empty
/// list means the schedule is feasible, semi-active and consistent.
pub fn validate_schedule(result: &ScheduleResult, instance: &Instance) -> Vec<Violation> {
    let mut violations = Vec::new();
    let ops = instance.ops_per_job();
    let mut grid: Vec<Option<OperationRecord>> = vec![None; instance.total_operations()];
    for rec in &result.operations {
        if rec.job >= instance.jobs() || rec.op >= ops {
            violations.push(Violation::Structure(format!("row ({}, {}) out of range", rec.job, rec.op)));
            continue;
        }
        let slot = &mut grid[rec.job * ops + rec.op];
        if slot.is_some() {
            violations.push(Violation::Structure(format!("row ({}, {}) repeated", rec.job, rec.op)));
        }
        *slot = Some(*rec);
    }
    if grid.iter().any(Option::is_none) {
        violations.push(Violation::Structure("schedule is incomplete".into()));
        return violations;
    }
    let row = |j: usize, i: usize| grid[j * ops + i].expect("checked complete");

    for j in 0..instance.jobs() {
        for i in 0..ops {
            let r = row(j, i);
            let source = instance.source_of(j, i);
            let target = instance.location_of(j, i);
            if r.machine != target.0 {
                violations.push(Violation::Structure(format!(
                    "({j}, {i}) placed on location {} instead of {}",
                    r.machine, target.0
                )));
            }
            if r.agv >= instance.agvs() {
                violations.push(Violation::Structure(format!("({j}, {i}) uses AGV {}", r.agv)));
            }
            if r.end != r.start + instance.proc_time(j, i) {
                violations.push(Violation::ProcessingDuration { job: j, op: i });
            }
            if r.transport_end != r.transport_start + instance.travel(source, target) {
                violations.push(Violation::TransportDuration { job: j, op: i });
            }
            let ready = if i == 0 { 0 } else { row(j, i - 1).end };
            if r.transport_start < ready {
                violations.push(Violation::JobPrecedence { job: j, op: i });
            }
            if r.start < r.transport_end {
                violations.push(Violation::TransportPrecedence { job: j, op: i });
            }
        }
    }

    // Decision order, used for tie-breaking and the semi-active replay.
    let mut order = vec![usize::MAX; instance.total_operations()];
    let mut cursor = vec![0usize; instance.jobs()];
    let mut trace_ok = result.decisions.len() == instance.total_operations();
    for (step, action) in result.decisions.iter().enumerate() {
        if action.job >= instance.jobs() || cursor[action.job] >= ops {
            trace_ok = false;
            break;
        }
        let op = cursor[action.job];
        cursor[action.job] += 1;
        order[action.job * ops + op] = step;
        if row(action.job, op).agv != action.agv {
            trace_ok = false;
        }
    }
    if !trace_ok {
        violations.push(Violation::Structure("decision trace does not match the rows".into()));
    }

    for m in 0..instance.machines() {
        let loc = Location::machine(m);
        let mut seq: Vec<(usize, usize)> = (0..instance.jobs())
            .flat_map(|j| (0..ops).map(move |i| (j, i)))
            .filter(|&(j, i)| instance.location_of(j, i) == loc)
            .collect();
        seq.sort_by_key(|&(j, i)| (row(j, i).start, row(j, i).end));
        for w in seq.windows(2) {
            if row(w[1].0, w[1].1).start < row(w[0].0, w[0].1).end {
                violations.push(Violation::MachineOverlap { machine: loc.0, first: w[0], second: w[1] });
            }
        }
    }

    for u in 0..instance.agvs() {
        let mut tasks: Vec<(usize, usize)> = (0..instance.jobs())
            .flat_map(|j| (0..ops).map(move |i| (j, i)))
            .filter(|&(j, i)| row(j, i).agv == u)
            .collect();
        tasks.sort_by_key(|&(j, i)| {
            let r = row(j, i);
            (r.transport_start, r.transport_end, order[j * ops + i])
        });
        let mut location = Location::LOAD;
        let mut free: Time = 0;
        let mut previous = None;
        for (j, i) in tasks {
            let r = row(j, i);
            let earliest = free + instance.travel(location, instance.source_of(j, i));
            if r.transport_start < earliest {
                violations.push(Violation::AgvOverlap {
                    agv: u,
                    first: previous.unwrap_or((usize::MAX, usize::MAX)),
                    second: (j, i),
                });
            }
            location = instance.location_of(j, i);
            free = r.transport_end;
            previous = Some((j, i));
        }
    }

    if trace_ok {
        let mut agvs = vec![(Location::LOAD, 0 as Time); instance.agvs()];
        let mut available = vec![0 as Time; instance.locations()];
        let mut cursor = vec![0usize; instance.jobs()];
        for action in &result.decisions {
            let (j, i) = (action.job, cursor[action.job]);
            cursor[j] += 1;
            let r = row(j, i);
            let (loc, idle) = agvs[action.agv];
            let source = instance.source_of(j, i);
            let target = instance.location_of(j, i);
            let ready = if i == 0 { 0 } else { row(j, i - 1).end };
            let earliest_transport = ready.max(idle + instance.travel(loc, source));
            let earliest_start = if target.is_processing() {
                r.transport_end.max(available[target.0])
            } else {
                r.transport_end
            };
            if r.transport_start != earliest_transport || r.start != earliest_start {
                violations.push(Violation::NotSemiActive { job: j, op: i });
            }
            if target.is_processing() {
                available[target.0] = r.end;
            }
            agvs[action.agv] = (target, r.transport_end);
        }
    }

    let actual = (0..instance.jobs()).map(|j| row(j, ops - 1).end).max().unwrap_or(0);
    if actual != result.makespan {
        violations.push(Violation::Makespan { reported: result.makespan, actual });
    }
    violations
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{i1, i2};

    #[test]
    fn reset_state() {
        let inst = i1();
        let state = ScheduleState::reset(&inst);
        assert_eq!(state.agv(0), AgvStatus { location: Location::LOAD, idle: 0 });
        assert_eq!(state.step(), 0);
        assert_eq!(state.valid_operations(), vec![0]);
        assert_eq!(state, ScheduleState::reset(&inst));
        assert_eq!(state.machine_available(Location::machine(0)), 0);
    }

    #[test]
    fn micro_instance_schedule() {
        let inst = i1();
        let mut state = ScheduleState::reset(&inst);
        let first = state.apply(JointAction::new(0, 0)).unwrap();
        assert_eq!(
            (first.transport_start, first.transport_end, first.start, first.end),
            (0, 2, 2, 7)
        );
        assert_eq!(state.agv(0), AgvStatus { location: Location::machine(0), idle: 2 });
        assert_eq!(state.valid_operations(), vec![0]);
        assert!(state.makespan().is_err());
        assert_eq!(state.terminal_reward(5.0), 0.0);
        let second = state.apply(JointAction::new(0, 0)).unwrap();
        assert_eq!(
            (second.transport_start, second.transport_end, second.start, second.end),
            (7, 10, 10, 10)
        );
        assert!(state.is_terminal());
        assert!(state.valid_operations().is_empty());
        assert_eq!(state.makespan().unwrap(), 10);
        assert_eq!(inst.lower_bound(), 10);
        assert!((state.terminal_reward(5.0) + 0.2).abs() < 1e-12);
    }

    #[test]
    fn rejected_actions_leave_state_unchanged() {
        let inst = i1();
        let mut state = replay(&inst, &[JointAction::new(0, 0), JointAction::new(0, 0)]).unwrap();
        let before = state.clone();
        assert_eq!(state.apply(JointAction::new(0, 0)), Err(EngineError::JobFinished(0)));
        assert_eq!(state, before);

        let mut fresh = ScheduleState::reset(&inst);
        assert_eq!(fresh.apply(JointAction::new(3, 0)), Err(EngineError::UnknownJob(3)));
        assert!(matches!(fresh.apply(JointAction::new(0, 1)), Err(EngineError::UnknownAgv { .. })));
        assert_eq!(fresh, ScheduleState::reset(&inst));
    }

    #[test]
    fn compatible_agvs_cover_the_fleet() {
        let inst = i2();
        let state = ScheduleState::reset(&inst);
        assert_eq!(state.compatible_agvs(1).unwrap(), vec![0, 1]);
        assert!(state.compatible_agvs(5).is_err());
    }

    #[test]
    fn makespan_is_max_over_jobs() {
        let inst = i2();
        let state = replay(
            &inst,
            &[
                JointAction::new(0, 0),
                JointAction::new(1, 1),
                JointAction::new(0, 0),
                JointAction::new(1, 1),
                JointAction::new(0, 0),
                JointAction::new(1, 1),
            ],
        )
        .unwrap();
        let ends: Vec<Time> = (0..2).map(|j| state.times(j, 2).unwrap().end).collect();
        assert_eq!(state.makespan().unwrap(), *ends.iter().max().unwrap());
    }

    #[test]
    fn zero_transport_bound_reduces_to_job_work() {
        let inst = Instance::new(
            "z",
            0,
            1,
            vec![vec![0, 1], vec![1, 0]],
            vec![vec![3, 4, 0], vec![9, 5, 0]],
            vec![0; 16],
        )
        .unwrap();
        assert_eq!(inst.lower_bound(), 14);
    }

    fn forged() -> (Instance, ScheduleResult) {
        let inst = i2();
        let result = replay(
            &inst,
            &[
                JointAction::new(0, 0),
                JointAction::new(1, 1),
                JointAction::new(0, 0),
                JointAction::new(1, 1),
                JointAction::new(0, 0),
                JointAction::new(1, 1),
            ],
        )
        .unwrap()
        .into_result("test")
        .unwrap();
        (inst, result)
    }

    #[test]
    fn engine_schedule_validates() {
        let (inst, result) = forged();
        assert_eq!(validate_schedule(&result, &inst), vec![]);
    }

    #[test]
    fn forged_machine_overlap_is_reported() {
        let inst = Instance::new(
            "overlap",
            0,
            2,
            vec![vec![0], vec![0]],
            vec![vec![4, 0], vec![4, 0]],
            vec![0, 1, 1, 1, 0, 1, 1, 1, 0],
        )
        .unwrap();
        let mut result = replay(
            &inst,
            &[JointAction::new(0, 0), JointAction::new(1, 1), JointAction::new(0, 0), JointAction::new(1, 1)],
        )
        .unwrap()
        .into_result("x")
        .unwrap();
        // Job 1 waits for job 0 on M1; pull it forward onto the busy machine.
        let row = result.operations.iter_mut().find(|r| r.job == 1 && r.op == 0).unwrap();
        row.start = 1;
        row.end = 5;
        let v = validate_schedule(&result, &inst);
        assert!(v.iter().any(|x| matches!(x, Violation::MachineOverlap { .. })), "{v:?}");
    }

    #[test]
    fn forged_early_processing_is_reported() {
        let (inst, mut result) = forged();
        let row = result.operations.iter_mut().find(|r| r.job == 0 && r.op == 0).unwrap();
        row.start = row.transport_end - 1;
        row.end = row.start + inst.proc_time(0, 0);
        let v = validate_schedule(&result, &inst);
        assert!(v.iter().any(|x| matches!(x, Violation::TransportPrecedence { job: 0, op: 0 })), "{v:?}");
    }

    #[test]
    fn forged_makespan_and_agv_conflicts_are_reported() {
        let (inst, mut result) = forged();
        result.makespan += 1;
        assert!(validate_schedule(&result, &inst)
            .iter()
            .any(|x| matches!(x, Violation::Makespan { .. })));

        let (inst, mut result) = forged();
        // Put job 1's first transport on AGV 0 at the same time as job 0's.
        for r in result.operations.iter_mut().filter(|r| r.job == 1) {
            r.agv = 0;
        }
        for d in result.decisions.iter_mut() {
            d.agv = 0;
        }
        let v = validate_schedule(&result, &inst);
        assert!(v.iter().any(|x| matches!(x, Violation::AgvOverlap { agv: 0, .. })), "{v:?}");
    }

    #[test]
    fn delayed_schedule_is_not_semi_active() {
        let (inst, mut result) = forged();
        let last = result.operations.iter_mut().find(|r| r.job == 0 && r.op == 2).unwrap();
        last.transport_start += 5;
        last.transport_end += 5;
        last.start += 5;
        last.end += 5;
        result.makespan = result.operations.iter().map(|r| r.end).max().unwrap();
        let v = validate_schedule(&result, &inst);
        assert_eq!(v, vec![Violation::NotSemiActive { job: 0, op: 2 }]);
    }

    #[test]
    fn schedule_document_round_trip() {
        let (_, result) = forged();
        assert_eq!(ScheduleResult::from_json(&result.to_json()).unwrap(), result);
    }
}
