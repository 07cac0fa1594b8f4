//! Experiment driver for the adaptive-rank advection-diffusion solver.
//!
//! The binary `acs` wraps these functions; the acceptance tests call them
//! directly.

pub mod config;
pub mod experiments;
pub mod records;

use acs_core::solver::IntegrationFailure;
use thiserror::Error;

pub use config::{ConfigFile, Integrator, RunConfig, TimeStep};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] acs_core::Error),
    #[error(transparent)]
    Integration(#[from] IntegrationFailure),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
