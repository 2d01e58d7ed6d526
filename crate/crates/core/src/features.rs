//! Observations: the disjunctive graph seen by the job scheduler and the
//! per-AGV feature vectors seen by the AGV scheduler.
//!
//! Following the source naming, job-chain arcs are called *precedence*
//! ("disjunctive") edges and operation/machine links *assignment*
//! ("conjunctive") edges.

use serde::{Deserialize, Serialize};

use crate::engine::ScheduleState;
use crate::error::EngineError;
use crate::instance::{Location, Time};

/// Min-max scales `value` into `[0, 1]`; a flat range maps to 0.
pub fn min_max(value: f64, min: f64, max: f64) -> f64 {
    if max > min {
        ((value - min) / (max - min)).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

fn bounds(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    values
        .into_iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// Raw lower bound of operation `op` of `job`: the latest completion among
/// the job's scheduled operations up to `op`, plus the processing left on
/// its unscheduled operations up to `op`.
///
/// For an already scheduled operation this is its own completion time.
pub fn op_lower_bound(state: &ScheduleState<'_>, job: usize, op: usize) -> Result<Time, EngineError> {
    let inst = state.instance();
    if job >= inst.jobs() || op >= inst.ops_per_job() {
        return Err(EngineError::UnknownOperation { job, op });
    }
    let next = state.next_operation(job);
    // Scheduled operations form a prefix of the chain, so the latest
    // completion among them is the last one's.
    let done = if next > 0 {
        let last = (next - 1).min(op);
        state.times(job, last).map_or(0, |t| t.end)
    } else {
        0
    };
    let remaining: Time = (next..=op).map(|i| inst.proc_time(job, i)).sum();
    Ok(done + remaining)
}

/// Share of the jobs whose operation at `location` is already scheduled.
pub fn machine_ratio(state: &ScheduleState<'_>, location: Location) -> Result<f64, EngineError> {
    let inst = state.instance();
    if location.0 >= inst.locations() {
        return Err(EngineError::UnknownLocation(location.0));
    }
    Ok(state.sequence(location).len() as f64 / inst.jobs() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VertexKind {
    Operation { job: usize, op: usize },
    Machine { location: Location },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub kind: VertexKind,
    /// `S(v)`.
    pub scheduled: bool,
    /// `T(v)`.
    pub is_machine: bool,
    /// Normalized lower bound for operations, scheduled ratio for machines.
    pub value: f64,
    /// Raw lower bound for operations, equal to `value` for machines.
    pub raw: f64,
}

/// Job-scheduler observation. Operation vertices come first (job-major),
/// followed by one vertex per location in transport-matrix order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisjunctiveGraph {
    pub vertices: Vec<Vertex>,
    /// `(from, to)` along each job chain.
    pub precedence: Vec<(usize, usize)>,
    /// Both directions of every operation/machine link.
    pub assignment: Vec<(usize, usize)>,
}

impl DisjunctiveGraph {
    pub fn operation_vertices(&self) -> impl Iterator<Item = &Vertex> {
        self.vertices.iter().filter(|v| !v.is_machine)
    }

    pub fn machine_vertices(&self) -> impl Iterator<Item = &Vertex> {
        self.vertices.iter().filter(|v| v.is_machine)
    }
}

/// Builds the graph for the current state.
///
/// A machine vertex counts as scheduled once every operation it serves is
/// scheduled. The load machine serves the first transport of every job.
pub fn build_graph(state: &ScheduleState<'_>) -> DisjunctiveGraph {
    let inst = state.instance();
    let ops = inst.ops_per_job();
    let op_count = inst.total_operations();

    let raw: Vec<Time> = (0..inst.jobs())
        .flat_map(|j| (0..ops).map(move |i| (j, i)))
        .map(|(j, i)| op_lower_bound(state, j, i).expect("indices in range"))
        .collect();
    let (lo, hi) = bounds(raw.iter().map(|&v| v as f64));

    let mut vertices = Vec::with_capacity(op_count + inst.locations());
    for j in 0..inst.jobs() {
        for i in 0..ops {
            let lb = raw[j * ops + i] as f64;
            vertices.push(Vertex {
                kind: VertexKind::Operation { job: j, op: i },
                scheduled: state.is_scheduled(j, i),
                is_machine: false,
                value: min_max(lb, lo, hi),
                raw: lb,
            });
        }
    }
    for l in 0..inst.locations() {
        let location = Location(l);
        let ratio = machine_ratio(state, location).expect("location in range");
        let scheduled = if location == Location::LOAD {
            (0..inst.jobs()).all(|j| state.is_scheduled(j, 0))
        } else {
            state.sequence(location).len() == inst.jobs()
        };
        vertices.push(Vertex {
            kind: VertexKind::Machine { location },
            scheduled,
            is_machine: true,
            value: ratio,
            raw: ratio,
        });
    }

    let mut precedence = Vec::with_capacity(inst.jobs() * inst.machines());
    let mut assignment = Vec::with_capacity(2 * op_count);
    for j in 0..inst.jobs() {
        for i in 0..ops {
            let v = j * ops + i;
            if i > 0 {
                precedence.push((v - 1, v));
            }
            let machine = op_count + inst.location_of(j, i).0;
            assignment.push((v, machine));
            assignment.push((machine, v));
        }
    }
    DisjunctiveGraph {
        vertices,
        precedence,
        assignment,
    }
}

/// The six AGV features for one candidate operation, in time units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawAgvFeatures {
    /// Earliest possible pick-up time (predecessor completion).
    pub eput: Time,
    /// Earliest start at the target machine.
    pub est: Time,
    /// When the AGV finishes its pending tasks.
    pub ert: Time,
    /// Empty travel from the AGV's idle location to the source.
    pub tts: Time,
    /// Earliest arrival at the source.
    pub eat: Time,
    /// Earliest completion of the whole transport task.
    pub eft: Time,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledAgvFeatures {
    pub eput: f64,
    pub est: f64,
    pub ert: f64,
    pub tts: f64,
    pub eat: f64,
    pub eft: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgvFeatureVector {
    pub agv: usize,
    pub raw: RawAgvFeatures,
    pub scaled: ScaledAgvFeatures,
}

/// Raw features of every AGV for the next operation of `job`.
pub fn raw_agv_features(state: &ScheduleState<'_>, job: usize) -> Result<Vec<RawAgvFeatures>, EngineError> {
    let op = state.check_job(job)?;
    let inst = state.instance();
    let source = inst.source_of(job, op);
    let target = inst.location_of(job, op);
    let eput = state.ready_time(job, op);
    let est = state.machine_available(target);
    let haul = inst.travel(source, target);
    Ok(state
        .agv_statuses()
        .iter()
        .map(|agv| {
            let ert = agv.idle;
            let tts = inst.travel(agv.location, source);
            let eat = ert + tts;
            RawAgvFeatures {
                eput,
                est,
                ert,
                tts,
                eat,
                eft: eat + haul,
            }
        })
        .collect())
}

/// Raw and scaled AGV features for the next operation of `job`.
///
/// ERT, TTS, EAT and EFT are scaled across the fleet. EPUT is scaled against
/// the ready times of the current frontier and EST against the availability
/// of the frontier's target machines.
pub fn agv_features(state: &ScheduleState<'_>, job: usize) -> Result<Vec<AgvFeatureVector>, EngineError> {
    let raw = raw_agv_features(state, job)?;
    let inst = state.instance();
    let frontier = state.valid_operations();
    let (ready_lo, ready_hi) = bounds(
        frontier
            .iter()
            .map(|&j| state.ready_time(j, state.next_operation(j)) as f64),
    );
    let (est_lo, est_hi) = bounds(frontier.iter().map(|&j| {
        state.machine_available(inst.location_of(j, state.next_operation(j))) as f64
    }));
    let fleet = |f: fn(&RawAgvFeatures) -> Time| bounds(raw.iter().map(|r| f(r) as f64));
    let ert_b = fleet(|r| r.ert);
    let tts_b = fleet(|r| r.tts);
    let eat_b = fleet(|r| r.eat);
    let eft_b = fleet(|r| r.eft);

    Ok(raw
        .iter()
        .enumerate()
        .map(|(agv, r)| AgvFeatureVector {
            agv,
            raw: *r,
            scaled: ScaledAgvFeatures {
                eput: min_max(r.eput as f64, ready_lo, ready_hi),
                est: min_max(r.est as f64, est_lo, est_hi),
                ert: min_max(r.ert as f64, ert_b.0, ert_b.1),
                tts: min_max(r.tts as f64, tts_b.0, tts_b.1),
                eat: min_max(r.eat as f64, eat_b.0, eat_b.1),
                eft: min_max(r.eft as f64, eft_b.0, eft_b.1),
            },
        })
        .collect())
}
