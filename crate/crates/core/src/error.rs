use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("invalid generation config: {0}")]
    Config(String),
    #[error("invalid instance field `{field}`: {reason}")]
    Field { field: String, reason: String },
    #[error("malformed instance document: {0}")]
    Parse(String),
}

impl InstanceError {
    pub(crate) fn field(field: impl Into<String>, reason: impl Into<String>) -> Self {
        InstanceError::Field {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

/// Errors raised by the scheduling engine. A rejected action never changes
/// the state it was applied to.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("job {0} does not exist")]
    UnknownJob(usize),
    #[error("job {0} has no unscheduled operation")]
    JobFinished(usize),
    #[error("AGV {agv} does not exist (fleet size {fleet})")]
    UnknownAgv { agv: usize, fleet: usize },
    #[error("operation ({job}, {op}) does not exist")]
    UnknownOperation { job: usize, op: usize },
    #[error("location {0} does not exist")]
    UnknownLocation(usize),
    #[error("schedule is not complete ({scheduled} of {total} operations)")]
    NotTerminal { scheduled: usize, total: usize },
    #[error("schedule is already complete")]
    Terminal,
}

/// Failures of a decision maker during an episode.
#[derive(Debug, Error)]
pub enum PolicyError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("unknown solver `{0}`")]
    UnknownSolver(String),
}
