//! Command line harness around `psewer-core`: scenario files, CSV and SVG
//! emission, and the standard five-configuration experiment.

pub mod commands;
pub mod csvio;
pub mod plot;
pub mod scenario;

pub use commands::{cmd_compare, cmd_experiment, cmd_simulate, run_experiment, CliError};
pub use scenario::{ResolvedScenario, ScenarioFile, SumMode};
