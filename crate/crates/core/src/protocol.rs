//! Line-delimited JSON protocol between the engine and an external policy.
//!
//! One episode per channel:
//!
//! ```text
//! engine -> {"type":"handshake","version":1,...}
//! engine -> {"type":"observation","phase":"operation","step":0,...}
//! policy <- {"step":0,"choice":<job>}
//! engine -> {"type":"observation","phase":"agv","step":0,"job":<job>,...}
//! policy <- {"step":0,"choice":<agv>}
//! ...
//! engine -> {"type":"terminal","makespan":...,"reward":...}
//! ```
//!
//! Times are integers; scaled features are written with six decimals.

use std::io::{BufRead, Write};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::engine::{JointAction, ScheduleState};
use crate::error::PolicyError;
use crate::features::{agv_features, build_graph, RawAgvFeatures, VertexKind};
use crate::instance::{Instance, InstanceDocument, Time};
use crate::rules::{solver_rng, ComboSolver};

pub const PROTOCOL_VERSION: u32 = 1;

/// A float written with exactly six decimals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fixed6(pub f64);

impl Fixed6 {
    pub fn new(value: f64) -> Self {
        Fixed6(format!("{value:.6}").parse().expect("formatted float parses"))
    }
}

impl Serialize for Fixed6 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let raw = RawValue::from_string(format!("{:.6}", self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Fixed6 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = f64::deserialize(deserializer)?;
        if !value.is_finite() {
            return Err(D::Error::custom("non-finite feature"));
        }
        Ok(Fixed6(value))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    /// The endpoint answers both queries.
    Joint,
    /// The endpoint selects operations; a built-in rule selects AGVs.
    Operation,
    /// The endpoint selects AGVs; a built-in rule selects operations.
    Agv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Handshake {
    pub version: u32,
    pub instance_id: String,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub role: Role,
    /// Seed of the episode's random stream.
    pub seed: u64,
    pub instance: InstanceDocument,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Operation,
    Agv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperationRow {
    pub job: usize,
    pub op: usize,
    pub scheduled: u8,
    pub machine: u8,
    pub lb: Fixed6,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MachineRow {
    pub location: usize,
    pub scheduled: u8,
    pub machine: u8,
    pub ratio: Fixed6,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphTables {
    pub operations: Vec<OperationRow>,
    pub machines: Vec<MachineRow>,
    pub precedence: Vec<(usize, usize)>,
    pub assignment: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledRow {
    pub eput: Fixed6,
    pub est: Fixed6,
    pub ert: Fixed6,
    pub tts: Fixed6,
    pub eat: Fixed6,
    pub eft: Fixed6,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgvRow {
    pub agv: usize,
    pub raw: RawAgvFeatures,
    pub scaled: ScaledRow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub version: u32,
    pub step: usize,
    pub phase: Phase,
    /// Valid jobs (operation phase) or compatible AGVs (AGV phase).
    pub mask: Vec<usize>,
    /// The joint action applied at the previous step.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub previous: Option<JointAction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphTables>,
    /// The job whose next operation the AGV is chosen for.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub job: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agvs: Option<Vec<AgvRow>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Terminal {
    pub makespan: Time,
    pub reward: Fixed6,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Message {
    Handshake(Handshake),
    Observation(Observation),
    Terminal(Terminal),
}

impl Message {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("protocol messages serialize")
    }

    pub fn parse(line: &str) -> Result<Message, PolicyError> {
        serde_json::from_str(line).map_err(|e| PolicyError::Protocol(format!("bad message: {e}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub step: usize,
    pub choice: usize,
}

impl Decision {
    pub fn to_line(self) -> String {
        serde_json::to_string(&self).expect("decisions serialize")
    }
}

pub fn handshake(instance: &Instance, role: Role, seed: u64) -> Message {
    Message::Handshake(Handshake {
        version: PROTOCOL_VERSION,
        instance_id: instance.id().to_string(),
        n: instance.jobs(),
        m: instance.machines(),
        k: instance.agvs(),
        role,
        seed,
        instance: instance.to_document(),
    })
}

/// Observation for the operation query, or for the AGV query of `job`.
pub fn serialize_observation(
    state: &ScheduleState<'_>,
    phase: Phase,
    selected_job: Option<usize>,
) -> Result<Message, PolicyError> {
    let previous = state.trace().last().copied();
    let observation = match (phase, selected_job) {
        (Phase::Operation, None) => {
            let graph = build_graph(state);
            let mut operations = Vec::new();
            let mut machines = Vec::new();
            for v in &graph.vertices {
                match v.kind {
                    VertexKind::Operation { job, op } => operations.push(OperationRow {
                        job,
                        op,
                        scheduled: v.scheduled as u8,
                        machine: 0,
                        lb: Fixed6::new(v.value),
                    }),
                    VertexKind::Machine { location } => machines.push(MachineRow {
                        location: location.0,
                        scheduled: v.scheduled as u8,
                        machine: 1,
                        ratio: Fixed6::new(v.value),
                    }),
                }
            }
            Observation {
                version: PROTOCOL_VERSION,
                step: state.step(),
                phase,
                mask: state.valid_operations(),
                previous,
                graph: Some(GraphTables {
                    operations,
                    machines,
                    precedence: graph.precedence,
                    assignment: graph.assignment,
                }),
                job: None,
                agvs: None,
            }
        }
        (Phase::Agv, Some(job)) => {
            let rows = agv_features(state, job)?
                .into_iter()
                .map(|f| AgvRow {
                    agv: f.agv,
                    raw: f.raw,
                    scaled: ScaledRow {
                        eput: Fixed6::new(f.scaled.eput),
                        est: Fixed6::new(f.scaled.est),
                        ert: Fixed6::new(f.scaled.ert),
                        tts: Fixed6::new(f.scaled.tts),
                        eat: Fixed6::new(f.scaled.eat),
                        eft: Fixed6::new(f.scaled.eft),
                    },
                })
                .collect();
            Observation {
                version: PROTOCOL_VERSION,
                step: state.step(),
                phase,
                mask: state.compatible_agvs(job)?,
                previous,
                graph: None,
                job: Some(job),
                agvs: Some(rows),
            }
        }
        (Phase::Operation, Some(_)) => {
            return Err(PolicyError::Protocol("operation phase takes no selected job".into()))
        }
        (Phase::Agv, None) => return Err(PolicyError::Protocol("AGV phase needs a selected job".into())),
    };
    Ok(Message::Observation(observation))
}

/// Extracts the choice from a reply to the query for `expected_step`.
pub fn parse_decision(line: &str, expected_step: usize) -> Result<usize, PolicyError> {
    let decision: Decision = serde_json::from_str(line.trim())
        .map_err(|e| PolicyError::Protocol(format!("malformed decision `{}`: {e}", line.trim())))?;
    if decision.step != expected_step {
        return Err(PolicyError::Protocol(format!(
            "stale decision for step {} while step {expected_step} is pending",
            decision.step
        )));
    }
    Ok(decision.choice)
}

/// Serves a built-in combo over the protocol: reads engine messages from
/// `input` and writes decisions to `output` until the terminal message.
///
/// The state is rebuilt from the handshake instance and the `previous`
/// action carried by each observation, and the rules draw from a stream seeded
/// with the handshake seed, so the answers match an in-process run.
pub fn serve_combo<R: BufRead, W: Write>(combo: &ComboSolver, input: R, mut output: W) -> Result<(), PolicyError> {
    let io = |e: std::io::Error| PolicyError::Transport(e.to_string());
    let mut lines = input.lines();
    let first = lines.next().ok_or_else(|| PolicyError::Protocol("missing handshake".into()))?.map_err(io)?;
    let Message::Handshake(hello) = Message::parse(&first)? else {
        return Err(PolicyError::Protocol("expected a handshake".into()));
    };
    if hello.version != PROTOCOL_VERSION {
        return Err(PolicyError::Protocol(format!("unsupported version {}", hello.version)));
    }
    let instance = Instance::try_from(hello.instance)
        .map_err(|e| PolicyError::Protocol(format!("handshake instance: {e}")))?;
    let mut state = ScheduleState::reset(&instance);
    let mut rng = solver_rng(hello.seed);

    for line in lines {
        let line = line.map_err(io)?;
        if line.trim().is_empty() {
            continue;
        }
        let choice = match Message::parse(&line)? {
            Message::Terminal(_) => return Ok(()),
            Message::Handshake(_) => return Err(PolicyError::Protocol("unexpected handshake".into())),
            Message::Observation(obs) => {
                if let Some(prev) = obs.previous {
                    if state.step() + 1 == obs.step {
                        state.apply(prev)?;
                    }
                }
                if state.step() != obs.step {
                    return Err(PolicyError::Protocol(format!(
                        "observation for step {} but local state is at {}",
                        obs.step,
                        state.step()
                    )));
                }
                match (obs.phase, obs.job) {
                    (Phase::Operation, _) => combo.operation_rule().select(&state, &mut rng)?,
                    (Phase::Agv, Some(job)) => combo.agv_rule().select(&state, job, &mut rng)?,
                    (Phase::Agv, None) => return Err(PolicyError::Protocol("AGV query without job".into())),
                }
            }
        };
        writeln!(output, "{}", Decision { step: state.step(), choice }.to_line()).map_err(io)?;
        output.flush().map_err(io)?;
    }
    Err(PolicyError::Protocol("channel closed before the terminal message".into()))
}
