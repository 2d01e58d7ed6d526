//! Experiment harness: plans, benchmark and grid runs, regression and the
//! `jsspt` command line.

pub mod commands;
pub mod error;
pub mod experiment;
pub mod plan;
pub mod regress;
pub mod table;

pub use commands::{run, Cli, Context};
pub use error::CliError;
pub use plan::{agv_ladder, ExperimentPlan, PlannedInstance, SizeConfig};
