//! Experiment harness: a registry of named numerical experiments, their
//! configuration files, and CSV/JSON reporting.

pub mod carrier;
pub mod config;
pub mod error;
pub mod experiments;
pub mod registry;
pub mod report;

pub use config::ExperimentConfig;
pub use error::{CliError, CliResult};
pub use registry::{lookup, run, REGISTRY};
pub use report::ExperimentReport;
