//! Scenario configuration, batch experiment running, sweeps, and artifact
//! export — the operational surface over the core toolkit.
//!
//! A scenario is one JSON file describing plant, controller, uncertainty
//! sources, horizon, and certification requests; a sweep wraps a scenario
//! template with a parameter grid and per-point seeds. Everything is
//! deterministic given the config and master seed: per-source randomness is
//! derived from fixed labels, so outputs are byte-identical across runs.

// `!(x >= 0.0)` guards intentionally reject NaN along with the sign check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;
pub mod scenario;
pub mod sweep;

use thiserror::Error;

pub use config::{
    ControllerConfig, DirectionConfig, MapConfig, MarginsConfig, ScenarioConfig, SetConfig,
    SignalConfig, SweepConfig, SweepParameter, SweepReduction, ThetaConfig, TvModeConfig,
};
pub use scenario::{run_scenario, validate_scenario, ScenarioOutcome, ScenarioReport};
pub use sweep::{run_sweep, validate_sweep, SweepOutcome, SweepPointSummary, SweepRow};

/// Harness-level errors, mapped to process exit codes by the binary.
#[derive(Debug, Error)]
pub enum HarnessError {
    /// The configuration failed validation; one message per violation.
    #[error("configuration invalid:\n{}", messages.join("\n"))]
    Validation { messages: Vec<String> },

    #[error(transparent)]
    Core(#[from] convcert_core::CoreError),

    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

impl HarnessError {
    pub fn validation(messages: Vec<String>) -> Self {
        HarnessError::Validation { messages }
    }
}
