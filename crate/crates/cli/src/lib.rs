//! Experiment runner for the damped NLS solvers: single runs, temporal and
//! spatial convergence sweeps, and long-time conservation studies.

pub mod commands;
pub mod config;
pub mod output;
pub mod snapshot;

pub use commands::CliError;
pub use config::{ConfigError, Experiment, ExperimentConfig, OutputFormat};
