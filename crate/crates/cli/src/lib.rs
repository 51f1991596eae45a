//! Scenario runner: reads a JSON run description, executes the solver, kernel
//! and path stages it names, and emits CSV tables plus a JSON verdict.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod report;
pub mod runner;

pub use config::{validate_config, ScenarioConfig};
pub use error::{CliError, ConfigIssue};
pub use report::{Bound, Check, RunReport};
pub use runner::run_scenario;
