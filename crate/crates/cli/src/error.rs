use std::path::Path;

use jsspt_core::oracle::OracleRefusal;
use jsspt_core::{InstanceError, PolicyError};
use jsspt_metrics::MetricsError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Plan(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Solver(#[from] PolicyError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("{0}")]
    Join(String),
    #[error(transparent)]
    Oracle(#[from] OracleRefusal),
}

impl CliError {
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Plan(_) => "plan",
            CliError::Io(_) => "io",
            CliError::Instance(_) => "instance",
            CliError::Solver(_) => "solver",
            CliError::Metrics(_) => "metrics",
            CliError::Join(_) => "join",
            CliError::Oracle(_) => "oracle",
        }
    }

    /// Process exit code. 2 is left to argument parsing.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Plan(_) => 3,
            CliError::Io(_) => 4,
            CliError::Instance(_) => 5,
            CliError::Solver(_) => 6,
            CliError::Metrics(_) => 7,
            CliError::Join(_) => 8,
            CliError::Oracle(_) => 9,
        }
    }

    pub fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Io(format!("{}: {err}", path.display()))
    }
}
