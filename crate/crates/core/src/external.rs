//! Policies living in another process, reached over stdin/stdout.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use crate::engine::ScheduleState;
use crate::error::PolicyError;
use crate::instance::{Instance, Time};
use crate::policy::Policy;
use crate::protocol::{self, Fixed6, Message, Phase, Role, Terminal};
use crate::rules::{AgvRule, OperationRule, SolverRng};

pub const DEFAULT_DECISION_TIMEOUT: Duration = Duration::from_secs(30);

/// How to launch an external policy. One process is started per episode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndpointSpec {
    pub program: String,
    pub args: Vec<String>,
    pub role: Role,
    pub timeout: Duration,
}

impl EndpointSpec {
    pub fn joint(program: impl Into<String>, args: Vec<String>) -> Self {
        EndpointSpec {
            program: program.into(),
            args,
            role: Role::Joint,
            timeout: DEFAULT_DECISION_TIMEOUT,
        }
    }

    /// Splits a shell-like command line on whitespace.
    pub fn from_command_line(command: &str, role: Role, timeout: Duration) -> Result<Self, PolicyError> {
        let mut parts = command.split_whitespace().map(str::to_string);
        let program = parts
            .next()
            .ok_or_else(|| PolicyError::Transport("empty endpoint command".into()))?;
        Ok(EndpointSpec {
            program,
            args: parts.collect(),
            role,
            timeout,
        })
    }
}

struct Channel {
    child: Child,
    stdin: Option<ChildStdin>,
    lines: Receiver<std::io::Result<String>>,
    timeout: Duration,
}

impl Channel {
    fn open(spec: &EndpointSpec) -> Result<Self, PolicyError> {
        let mut child = Command::new(&spec.program)
            .args(&spec.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| PolicyError::Transport(format!("cannot start `{}`: {e}", spec.program)))?;
        let stdout = child.stdout.take().expect("stdout is piped");
        let stdin = child.stdin.take();
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(Channel {
            child,
            stdin,
            lines: rx,
            timeout: spec.timeout,
        })
    }

    fn send(&mut self, message: &Message) -> Result<(), PolicyError> {
        let stdin = self
            .stdin
            .as_mut()
            .ok_or_else(|| PolicyError::Transport("channel already closed".into()))?;
        writeln!(stdin, "{}", message.to_line())
            .and_then(|_| stdin.flush())
            .map_err(|e| PolicyError::Transport(format!("write failed: {e}")))
    }

    fn receive(&mut self) -> Result<String, PolicyError> {
        match self.lines.recv_timeout(self.timeout) {
            Ok(Ok(line)) => Ok(line),
            Ok(Err(e)) => Err(PolicyError::Transport(format!("read failed: {e}"))),
            Err(RecvTimeoutError::Timeout) => Err(PolicyError::Transport(format!(
                "no decision within {:?}",
                self.timeout
            ))),
            Err(RecvTimeoutError::Disconnected) => Err(PolicyError::Transport("policy process closed its output".into())),
        }
    }

    fn query(&mut self, message: &Message, step: usize, mask: &[usize]) -> Result<usize, PolicyError> {
        self.send(message)?;
        let choice = protocol::parse_decision(&self.receive()?, step)?;
        if !mask.contains(&choice) {
            return Err(PolicyError::Protocol(format!("step {step}: choice {choice} is masked")));
        }
        Ok(choice)
    }

    fn close(&mut self) {
        drop(self.stdin.take());
        let deadline = Instant::now() + self.timeout;
        loop {
            match self.child.try_wait() {
                Ok(Some(_)) | Err(_) => return,
                Ok(None) if Instant::now() >= deadline => {
                    let _ = self.child.kill();
                    let _ = self.child.wait();
                    return;
                }
                Ok(None) => thread::sleep(Duration::from_millis(2)),
            }
        }
    }
}

impl Drop for Channel {
    fn drop(&mut self) {
        if self.stdin.is_some() {
            let _ = self.child.kill();
            let _ = self.child.wait();
        }
    }
}

/// A [`Policy`] backed by an external process.
///
/// With [`Role::Operation`] or [`Role::Agv`] the other half of each decision
/// comes from a built-in rule.
pub struct ExternalPolicy {
    id: String,
    spec: EndpointSpec,
    operation_rule: Option<Arc<dyn OperationRule>>,
    agv_rule: Option<Arc<dyn AgvRule>>,
    channel: Option<Channel>,
}

impl ExternalPolicy {
    pub fn new(id: impl Into<String>, spec: EndpointSpec) -> Self {
        ExternalPolicy {
            id: id.into(),
            spec,
            operation_rule: None,
            agv_rule: None,
            channel: None,
        }
    }

    /// Built-in operation rule used when the endpoint only picks AGVs.
    pub fn with_operation_rule(mut self, rule: Arc<dyn OperationRule>) -> Self {
        self.operation_rule = Some(rule);
        self
    }

    pub fn with_agv_rule(mut self, rule: Arc<dyn AgvRule>) -> Self {
        self.agv_rule = Some(rule);
        self
    }

    fn channel(&mut self) -> Result<&mut Channel, PolicyError> {
        self.channel
            .as_mut()
            .ok_or_else(|| PolicyError::Transport("episode not started".into()))
    }
}

impl Policy for ExternalPolicy {
    fn id(&self) -> String {
        self.id.clone()
    }

    fn begin(&mut self, instance: &Instance, seed: u64) -> Result<(), PolicyError> {
        match self.spec.role {
            Role::Operation if self.agv_rule.is_none() => {
                return Err(PolicyError::Protocol("operation-only endpoint needs an AGV rule".into()))
            }
            Role::Agv if self.operation_rule.is_none() => {
                return Err(PolicyError::Protocol("AGV-only endpoint needs an operation rule".into()))
            }
            _ => {}
        }
        self.channel = None;
        let mut channel = Channel::open(&self.spec)?;
        channel.send(&protocol::handshake(instance, self.spec.role, seed))?;
        self.channel = Some(channel);
        Ok(())
    }

    fn choose_operation(&mut self, state: &ScheduleState<'_>, rng: &mut SolverRng) -> Result<usize, PolicyError> {
        if self.spec.role == Role::Agv {
            let rule = self.operation_rule.as_ref().expect("checked in begin");
            return Ok(rule.select(state, rng)?);
        }
        let message = protocol::serialize_observation(state, Phase::Operation, None)?;
        let mask = state.valid_operations();
        self.channel()?.query(&message, state.step(), &mask)
    }

    fn choose_agv(&mut self, state: &ScheduleState<'_>, job: usize, rng: &mut SolverRng) -> Result<usize, PolicyError> {
        if self.spec.role == Role::Operation {
            let rule = self.agv_rule.as_ref().expect("checked in begin");
            return Ok(rule.select(state, job, rng)?);
        }
        let message = protocol::serialize_observation(state, Phase::Agv, Some(job))?;
        let mask = state.compatible_agvs(job)?;
        self.channel()?.query(&message, state.step(), &mask)
    }

    fn finish(&mut self, makespan: Time, reward: f64) -> Result<(), PolicyError> {
        let mut channel = self
            .channel
            .take()
            .ok_or_else(|| PolicyError::Transport("episode not started".into()))?;
        channel.send(&Message::Terminal(Terminal {
            makespan,
            reward: Fixed6::new(reward),
        }))?;
        channel.close();
        Ok(())
    }
}
