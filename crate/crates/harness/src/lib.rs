//! Experiment pipelines, verification oracles and configuration for the
//! `betaens` command line tool.

pub mod config;
pub mod error;
pub mod experiment;
pub mod oracle;
pub mod verify;

pub use config::{ExperimentConfig, RawConfig, Statistic};
pub use error::{HarnessError, Result};
pub use experiment::{run_experiment, ExperimentOutcome, ExperimentReport};
