//! Projection-algorithm parameter estimator.
//!
//! Given the regression vector `φ(t)` and the next output `y(t+1)`, the
//! estimate moves along the normalized gradient of the prediction error and
//! is then projected back onto its admissible convex set:
//!
//! ```text
//! e(t+1) = y(t+1) − θ̂(t)ᵀ φ(t)
//! θ̌(t+1) = θ̂(t) + φ(t) e(t+1)ᵀ / ‖φ(t)‖²     (θ̂ unchanged when φ(t) = 0)
//! θ̂(t+1) = Proj_𝒮 { θ̌(t+1) }
//! ```
//!
//! The update divides by `‖φ‖²` with no dead-zone; the branch guards only
//! literal division by zero.

use nalgebra::{DMatrix, DVector};

use crate::estimation::ConvexParamSet;
use crate::linalg::{flatten_row_major, unflatten_row_major};
use crate::Result;

/// Threshold on `‖φ‖²` below which the regressor counts as exactly zero.
pub const ZERO_REGRESSOR_GUARD: f64 = 1e-300;

/// State of one projection-algorithm estimator.
///
/// `theta_hat` is `p × r` (a column per output channel); it remains inside
/// `set` after every update since the update ends in a projection.
#[derive(Debug, Clone)]
pub struct EstimatorState {
    pub theta_hat: DMatrix<f64>,
    pub set: ConvexParamSet,
    pub set_index: u8,
}

impl EstimatorState {
    /// A new estimator initialized at `theta0` (projected into the set so the
    /// confinement invariant holds from the start).
    pub fn new(theta0: DMatrix<f64>, set: ConvexParamSet, set_index: u8) -> Result<Self> {
        let flat = set.project(&flatten_row_major(&theta0))?;
        let theta_hat = unflatten_row_major(&flat, theta0.nrows(), theta0.ncols());
        Ok(EstimatorState { theta_hat, set, set_index })
    }

    /// Distance of the current estimate to its admissible set.
    pub fn set_distance(&self) -> Result<f64> {
        self.set.distance(&flatten_row_major(&self.theta_hat))
    }

    /// In-place projection update; see [`projection_update`].
    pub fn update(&mut self, phi: &DVector<f64>, e_next: &DVector<f64>) -> Result<()> {
        let next = projection_update(self, phi, e_next)?;
        self.theta_hat = next.theta_hat;
        Ok(())
    }
}

/// Prediction error `e(t+1) = y(t+1) − θ̂(t)ᵀ φ(t)`.
pub fn prediction_error(
    theta_hat: &DMatrix<f64>,
    phi: &DVector<f64>,
    y_next: &DVector<f64>,
) -> DVector<f64> {
    y_next - theta_hat.transpose() * phi
}

/// One projection-algorithm step, returning the updated state.
pub fn projection_update(
    state: &EstimatorState,
    phi: &DVector<f64>,
    e_next: &DVector<f64>,
) -> Result<EstimatorState> {
    let norm_sq = phi.dot(phi);
    let candidate = if norm_sq < ZERO_REGRESSOR_GUARD {
        state.theta_hat.clone()
    } else {
        &state.theta_hat + phi * e_next.transpose() / norm_sq
    };
    let projected = state.set.project(&flatten_row_major(&candidate))?;
    Ok(EstimatorState {
        theta_hat: unflatten_row_major(&projected, candidate.nrows(), candidate.ncols()),
        set: state.set.clone(),
        set_index: state.set_index,
    })
}
