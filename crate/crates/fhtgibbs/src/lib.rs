//! Experiment driver for ensemble annealed sampling and FHT density fitting:
//! TOML run configurations, binary sample and model files, and the
//! `sample`, `fit`, `diagnose` and `pipeline` commands.

pub mod commands;
pub mod config;
pub mod diagnose;
pub mod error;
pub mod fit;
pub mod formats;
pub mod sample;

pub use config::RunConfig;
pub use error::{CliError, Result};
