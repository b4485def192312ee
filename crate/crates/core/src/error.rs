//! Error type shared across the crate.

use thiserror::Error;

/// Errors surfaced by simulation, estimation, and analysis operations.
///
/// Trajectory divergence is deliberately *not* an error: unstable
/// configurations are expected experiment outcomes and are recorded on the
/// trace instead (see [`crate::model::ClosedLoopTrace::divergence`]).
#[derive(Debug, Clone, Error)]
pub enum CoreError {
    /// Vector/matrix dimensions inconsistent with the declared layout.
    #[error("dimension mismatch: {context}")]
    Dimension { context: String },

    /// A signal window reaches back before the available history.
    #[error("insufficient history: need {needed} samples ending at t={t}, have {have}")]
    InsufficientHistory { needed: usize, have: usize, t: i64 },

    /// A controller or scenario is wired in a way the simulator rejects.
    #[error("configuration error: {message}")]
    Configuration { message: String },

    /// A numeric parameter is outside its admissible range.
    #[error("parameter error: {message}")]
    Parameter { message: String },

    /// A parameter set failed construction-time certification.
    #[error("set construction error: {message}")]
    SetConstruction { message: String },

    /// An iterative projection failed to reach its tolerance.
    #[error("projection did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    /// The Sylvester system of the pole-placement design is near-singular,
    /// indicating a near-common factor between the estimated polynomials.
    #[error("near-common-factor: Sylvester system condition {condition:.3e} exceeds limit")]
    NearSingular { condition: f64 },

    /// A requested uncertainty realization cannot be generated.
    #[error("generation error: {message}")]
    Generation { message: String },

    /// No finite gain makes the convolution bound hold for this trace.
    #[error("unfittable: state norm positive but bound right side zero at pair (tau={tau}, t={t})")]
    Unfittable { tau: i64, t: i64 },

    /// Invariant breakage that indicates a bug rather than bad input.
    #[error("internal error: {message}")]
    Internal { message: String },
}

impl CoreError {
    pub(crate) fn dim(context: impl Into<String>) -> Self {
        CoreError::Dimension { context: context.into() }
    }

    pub(crate) fn config(message: impl Into<String>) -> Self {
        CoreError::Configuration { message: message.into() }
    }

    pub(crate) fn param(message: impl Into<String>) -> Self {
        CoreError::Parameter { message: message.into() }
    }
}
