//! Experiment harness: TOML configs, the run grid, per-run CSV metrics, a
//! suite summary, and reports over a results directory.

pub mod config;
pub mod report;
pub mod suite;

pub use config::{CorruptionSweep, Drop, ExperimentConfig, Level, Method, SequenceSource, TaskOverride};
pub use report::{report, Report};
pub use suite::{ablate, plan, run_suite, Summary};
