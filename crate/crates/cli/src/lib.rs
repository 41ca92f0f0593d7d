//! Experiment runner behind the `fpiter` binary.

pub mod config;
pub mod output;
pub mod runner;

pub use config::{ConfigError, ExperimentConfig, NamedSchedule};
pub use output::{emit_summary_json, emit_trace_csv, Summary};
pub use runner::{run_experiments, run_grid, RunError, RunOutcome};
