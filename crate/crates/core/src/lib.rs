//! Job-shop scheduling with AGV transport.
//!
//! * [`instance`]: problem definition, generation and the JSON document.
//! * [`engine`]: the construction environment and schedule validation.
//! * [`features`]: disjunctive-graph and AGV observations.
//! * [`rules`]: dispatching rules behind a name-indexed registry.
//! * [`policy`], [`protocol`], [`external`]: running episodes with built-in
//!   or out-of-process policies.
//! * [`oracle`]: brute-force optimum for tiny instances.

pub mod engine;
pub mod error;
pub mod external;
pub mod features;
pub mod fixtures;
pub mod instance;
pub mod oracle;
pub mod policy;
pub mod protocol;
pub mod rules;

pub use engine::{JointAction, ScheduleResult, ScheduleState};
pub use error::{EngineError, InstanceError, PolicyError};
pub use instance::{Instance, Location, Time};
pub use rules::{ComboSolver, RuleRegistry};
