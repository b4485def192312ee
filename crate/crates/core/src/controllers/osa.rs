//! First-order one-step-ahead switching adaptive control.
//!
//! The plant is `y(t+1) = a y(t) + b u(t) + w(t)` with `(a, b)` confined to
//! the union of two compact convex sets, each excluding `b = 0`. One
//! projection-algorithm estimator runs per set; the active index follows the
//! smaller instantaneous prediction error, and the certainty-equivalence law
//!
//! ```text
//! u(t) = −(â_σ/b̂_σ) y(t) + y*(t+1)/b̂_σ
//! ```
//!
//! places the predicted output at the reference. In the two-part controller
//! interface the whole state is `z_2 = (θ̂_1, θ̂_2) ∈ 𝒮_1 × 𝒮_2` and the
//! bound reference is `r(t) = y*(t+1)`.

use nalgebra::{DMatrix, DVector};

use crate::error::CoreError;
use crate::estimation::{prediction_error, ConvexParamSet, EstimatorState};
use crate::model::{Controller, PreRegressor, Regressor, SignalSource};
use crate::Result;

/// Gain denominators below this magnitude are rejected.
const B_HAT_GUARD: f64 = 1e-12;

/// One-step-ahead control law `u = −(â/b̂)y + y*⁺/b̂`.
pub fn osa_control(a_hat: f64, b_hat: f64, y: f64, y_star_next: f64) -> Result<f64> {
    if b_hat.abs() < B_HAT_GUARD {
        return Err(CoreError::config(format!(
            "certainty-equivalence gain b estimate {b_hat:.3e} is numerically zero; \
             the parameter sets must exclude b = 0"
        )));
    }
    Ok(-(a_hat / b_hat) * y + y_star_next / b_hat)
}

/// Pick the estimator with the smaller prediction error; ties keep the
/// previous index to avoid chattering.
pub fn osa_switch(e1_abs: f64, e2_abs: f64, sigma_prev: u8) -> u8 {
    if e1_abs < e2_abs {
        1
    } else if e2_abs < e1_abs {
        2
    } else {
        sigma_prev
    }
}

/// The two-estimator switching controller for the first-order plant.
#[derive(Debug, Clone)]
pub struct OsaController {
    estimators: [EstimatorState; 2],
    sigma: u8,
    last_errors: [f64; 2],
}

impl OsaController {
    pub fn new(
        set1: ConvexParamSet,
        set2: ConvexParamSet,
        theta1_init: DVector<f64>,
        theta2_init: DVector<f64>,
        sigma0: u8,
    ) -> Result<Self> {
        if !(sigma0 == 1 || sigma0 == 2) {
            return Err(CoreError::param(format!("sigma0 must be 1 or 2, got {sigma0}")));
        }
        if set1.dim() != 2 || set2.dim() != 2 {
            return Err(CoreError::dim("one-step-ahead parameter sets live in R^2"));
        }
        let e1 = EstimatorState::new(DMatrix::from_column_slice(2, 1, theta1_init.as_slice()), set1, 1)?;
        let e2 = EstimatorState::new(DMatrix::from_column_slice(2, 1, theta2_init.as_slice()), set2, 2)?;
        Ok(OsaController { estimators: [e1, e2], sigma: sigma0, last_errors: [0.0, 0.0] })
    }

    pub fn sigma_now(&self) -> u8 {
        self.sigma
    }

    fn active(&self) -> &EstimatorState {
        &self.estimators[(self.sigma - 1) as usize]
    }

    /// `(â_σ, b̂_σ)` of the active estimator.
    pub fn active_gains(&self) -> (f64, f64) {
        let th = &self.active().theta_hat;
        (th[(0, 0)], th[(1, 0)])
    }
}

impl Controller for OsaController {
    fn control(
        &mut self,
        pre: &PreRegressor,
        reference: &SignalSource,
        t: i64,
    ) -> Result<DVector<f64>> {
        let (a_hat, b_hat) = self.active_gains();
        let y = pre.y_now()[0];
        let y_star_next = reference.value(t + 1)[0];
        let u = osa_control(a_hat, b_hat, y, y_star_next)?;
        Ok(DVector::from_element(1, u))
    }

    fn update(
        &mut self,
        phi: &Regressor,
        y_next: &DVector<f64>,
        _reference: &SignalSource,
        _t: i64,
    ) -> Result<()> {
        let flat = phi.flatten();
        let mut errs = [0.0f64; 2];
        for (i, est) in self.estimators.iter_mut().enumerate() {
            let e = prediction_error(&est.theta_hat, &flat, y_next);
            errs[i] = e[0];
            est.update(&flat, &e)?;
        }
        self.sigma = osa_switch(errs[0].abs(), errs[1].abs(), self.sigma);
        self.last_errors = errs;
        Ok(())
    }

    fn bound_reference(&self, reference: &SignalSource, t: i64) -> DVector<f64> {
        reference.value(t + 1)
    }

    fn sigma(&self) -> Option<u8> {
        Some(self.sigma)
    }

    fn estimates(&self) -> Vec<DMatrix<f64>> {
        self.estimators.iter().map(|e| e.theta_hat.clone()).collect()
    }

    fn prediction_errors(&self) -> Vec<DVector<f64>> {
        self.last_errors.iter().map(|&e| DVector::from_element(1, e)).collect()
    }

    fn z2_distance(&self) -> Result<f64> {
        let d1 = self.estimators[0].set_distance()?;
        let d2 = self.estimators[1].set_distance()?;
        Ok(d1.max(d2))
    }
}
