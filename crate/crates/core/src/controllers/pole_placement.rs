//! Pole-placement switching adaptive control for the n-th order plant, plus
//! the known-parameter deadbeat baseline.
//!
//! Two projection-algorithm estimators run every step; control gains are
//! refreshed only at epoch boundaries `t̂_ℓ = t_0 + ℓN` (`N ≥ 2n`) by solving
//! the Diophantine equation at the epoch-start estimates, and the active
//! index follows the smaller per-epoch performance signal
//!
//! ```text
//! J_i(t̂_ℓ) = max { |e_i(j+1)| / ‖φ(j)‖ : j in the epoch, φ(j) ≠ 0 }
//! ```
//!
//! (zero when every regressor in the epoch vanishes). The strictly proper
//! control law and the filtered reference are
//!
//! ```text
//! u(t)   = K̂_{σ(t−1)}(t−1) φ(t−1) + r_2(t−1)
//! r_2(t) = Σ_{j=1}^n p̂_{σ(t̂_ℓ),j}(t̂_ℓ) · y*(t−j+1)
//! ```
//!
//! with every coefficient frozen over its epoch.

use nalgebra::{DMatrix, DVector};

use crate::controllers::{pp_solve_diophantine, Polynomial};
use crate::error::CoreError;
use crate::estimation::{prediction_error, ConvexParamSet, EstimatorState, ZERO_REGRESSOR_GUARD};
use crate::model::{Controller, PreRegressor, Regressor, SignalSource};
use crate::Result;

/// Strictly proper feedback `u(t) = K̂ φ(t−1) + r_2(t−1)`.
pub fn pp_control(gain_row: &DVector<f64>, phi_prev: &DVector<f64>, r2_prev: f64) -> f64 {
    gain_row.dot(phi_prev) + r2_prev
}

/// Filtered reference `r_2(t) = Σ_{j=1}^n p_j · y*(t−j+1)`.
pub fn pp_filtered_reference(p_coeffs: &[f64], reference: &SignalSource, t: i64) -> f64 {
    let mut r2 = 0.0;
    for (j, &p) in p_coeffs.iter().enumerate() {
        r2 += p * reference.value(t - j as i64)[0];
    }
    r2
}

/// Per-epoch performance signal from `(|e_i(j+1)|, ‖φ(j)‖)` pairs.
pub fn pp_performance(pairs: &[(f64, f64)]) -> f64 {
    let mut best: Option<f64> = None;
    for &(e_abs, phi_norm) in pairs {
        if phi_norm * phi_norm >= ZERO_REGRESSOR_GUARD {
            let ratio = e_abs / phi_norm;
            best = Some(best.map_or(ratio, |b: f64| b.max(ratio)));
        }
    }
    best.unwrap_or(0.0)
}

/// Epoch switching: smaller performance wins, ties keep the previous index.
pub fn pp_switch(j1: f64, j2: f64, sigma_prev: u8) -> u8 {
    if j1 < j2 {
        1
    } else if j2 < j1 {
        2
    } else {
        sigma_prev
    }
}

/// Running per-epoch maximum of `|e|/‖φ‖`.
#[derive(Debug, Clone, Copy, Default)]
struct EpochAccumulator {
    max_ratio: f64,
    any_nonzero_phi: bool,
}

impl EpochAccumulator {
    fn push(&mut self, e_abs: f64, phi_norm: f64) {
        if phi_norm * phi_norm >= ZERO_REGRESSOR_GUARD {
            self.any_nonzero_phi = true;
            self.max_ratio = self.max_ratio.max(e_abs / phi_norm);
        }
    }

    fn finish(self) -> f64 {
        if self.any_nonzero_phi {
            self.max_ratio
        } else {
            0.0
        }
    }
}

/// The two-estimator pole-placement switching controller.
#[derive(Debug, Clone)]
pub struct PpController {
    n: usize,
    epoch_len: usize,
    t0: i64,
    estimators: [EstimatorState; 2],
    sigma: u8,
    /// `K̂_i` frozen over the current epoch.
    gains: [DVector<f64>; 2],
    /// `P̂` coefficients of the active index, frozen at epoch start.
    p_snapshot: Vec<f64>,
    accumulators: [EpochAccumulator; 2],
    pending_u: Option<f64>,
    last_errors: [f64; 2],
    /// `(epoch start, condition)` of gain refreshes that kept old gains.
    refresh_failures: Vec<(i64, f64)>,
}

impl PpController {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n: usize,
        epoch_len: usize,
        t0: i64,
        set1: ConvexParamSet,
        set2: ConvexParamSet,
        theta1_init: DVector<f64>,
        theta2_init: DVector<f64>,
        sigma0: u8,
    ) -> Result<Self> {
        if n == 0 {
            return Err(CoreError::param("plant order n must be positive"));
        }
        if epoch_len < 2 * n {
            return Err(CoreError::param(format!(
                "epoch length N = {epoch_len} violates N >= 2n = {}",
                2 * n
            )));
        }
        if !(sigma0 == 1 || sigma0 == 2) {
            return Err(CoreError::param(format!("sigma0 must be 1 or 2, got {sigma0}")));
        }
        if set1.dim() != 2 * n || set2.dim() != 2 * n {
            return Err(CoreError::dim(format!(
                "pole-placement parameter sets live in R^{}",
                2 * n
            )));
        }
        let est1 = EstimatorState::new(
            DMatrix::from_column_slice(2 * n, 1, theta1_init.as_slice()),
            set1,
            1,
        )?;
        let est2 = EstimatorState::new(
            DMatrix::from_column_slice(2 * n, 1, theta2_init.as_slice()),
            set2,
            2,
        )?;

        let mut controller = PpController {
            n,
            epoch_len,
            t0,
            estimators: [est1, est2],
            sigma: sigma0,
            gains: [DVector::zeros(2 * n), DVector::zeros(2 * n)],
            p_snapshot: vec![0.0; n],
            accumulators: [EpochAccumulator::default(), EpochAccumulator::default()],
            pending_u: None,
            last_errors: [0.0, 0.0],
            refresh_failures: Vec::new(),
        };
        // Initial design has no previous gains to fall back on.
        controller.refresh_gains(t0, true)?;
        Ok(controller)
    }

    pub fn sigma_now(&self) -> u8 {
        self.sigma
    }

    /// Plant order `n`.
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn epoch_len(&self) -> usize {
        self.epoch_len
    }

    /// Gain refreshes that failed and kept the previous epoch's design.
    pub fn refresh_failures(&self) -> &[(i64, f64)] {
        &self.refresh_failures
    }

    fn theta_vec(&self, i: usize) -> DVector<f64> {
        DVector::from_column_slice(self.estimators[i].theta_hat.as_slice())
    }

    /// Solve the Diophantine design for both estimates at an epoch start.
    ///
    /// On a near-singular system the previous gains are retained and the
    /// event logged, keeping the simulation total; at construction there is
    /// nothing to retain, so the error propagates.
    fn refresh_gains(&mut self, epoch_start: i64, strict: bool) -> Result<()> {
        for i in 0..2 {
            let theta = self.theta_vec(i);
            let (a_hat, b_hat) = Polynomial::plant_pair_from_theta(&theta);
            match pp_solve_diophantine(&a_hat, &b_hat) {
                Ok(sol) => {
                    self.gains[i] = sol.gain_row();
                    if i + 1 == self.sigma as usize {
                        self.p_snapshot = sol.p_coeffs().to_vec();
                    }
                }
                Err(e @ CoreError::NearSingular { condition }) => {
                    if strict {
                        return Err(e);
                    }
                    self.refresh_failures.push((epoch_start, condition));
                }
                Err(e) => return Err(e),
            }
        }
        Ok(())
    }

    fn is_epoch_boundary(&self, t: i64) -> bool {
        (t - self.t0) % self.epoch_len as i64 == 0
    }
}

impl Controller for PpController {
    fn control(
        &mut self,
        _pre: &PreRegressor,
        _reference: &SignalSource,
        t: i64,
    ) -> Result<DVector<f64>> {
        let u = self.pending_u.ok_or_else(|| {
            CoreError::config(format!(
                "pole-placement control requested at t={t} before any update; \
                 u(t0) must come from the initial window"
            ))
        })?;
        Ok(DVector::from_element(1, u))
    }

    fn update(
        &mut self,
        phi: &Regressor,
        y_next: &DVector<f64>,
        reference: &SignalSource,
        t: i64,
    ) -> Result<()> {
        let flat = phi.flatten();
        let phi_norm = flat.norm();

        // Prediction errors at the pre-update estimates.
        let mut errs = [0.0f64; 2];
        for (err, (est, acc)) in errs
            .iter_mut()
            .zip(self.estimators.iter().zip(self.accumulators.iter_mut()))
        {
            let e = prediction_error(&est.theta_hat, &flat, y_next);
            *err = e[0];
            acc.push(err.abs(), phi_norm);
        }

        // u(t+1) uses the gains and reference snapshot of the epoch holding t.
        let r2_t = pp_filtered_reference(&self.p_snapshot, reference, t);
        self.pending_u =
            Some(pp_control(&self.gains[(self.sigma - 1) as usize], &flat, r2_t));

        for (est, &err) in self.estimators.iter_mut().zip(errs.iter()) {
            est.update(&flat, &DVector::from_element(1, err))?;
        }
        self.last_errors = errs;

        // Epoch boundary at t+1: score the finished epoch, switch, redesign.
        if self.is_epoch_boundary(t + 1) {
            let j1 = self.accumulators[0].finish();
            let j2 = self.accumulators[1].finish();
            self.sigma = pp_switch(j1, j2, self.sigma);
            self.accumulators = [EpochAccumulator::default(), EpochAccumulator::default()];
            self.refresh_gains(t + 1, false)?;
        }
        Ok(())
    }

    fn bound_reference(&self, reference: &SignalSource, t: i64) -> DVector<f64> {
        DVector::from_element(1, pp_filtered_reference(&self.p_snapshot, reference, t))
    }

    fn first_input_from_init(&self) -> bool {
        true
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

/// Known-parameter deadbeat controller: the pole-placement design computed
/// once at the true parameters, with no estimation and no switching. Serves
/// as the oracle closed loop for calibrating the bound checker.
#[derive(Debug, Clone)]
pub struct DeadbeatController {
    gain: DVector<f64>,
    p_coeffs: Vec<f64>,
    pending_u: Option<f64>,
}

/// Build the deadbeat baseline from the true `θ* = [a_1..a_n, b_1..b_n]`.
pub fn deadbeat_baseline(theta_star: &DVector<f64>) -> Result<DeadbeatController> {
    if !theta_star.len().is_multiple_of(2) || theta_star.is_empty() {
        return Err(CoreError::dim("theta must stack n a-coefficients and n b-coefficients"));
    }
    let (a_hat, b_hat) = Polynomial::plant_pair_from_theta(theta_star);
    let sol = pp_solve_diophantine(&a_hat, &b_hat)?;
    Ok(DeadbeatController {
        gain: sol.gain_row(),
        p_coeffs: sol.p_coeffs().to_vec(),
        pending_u: None,
    })
}

impl Controller for DeadbeatController {
    fn control(
        &mut self,
        _pre: &PreRegressor,
        _reference: &SignalSource,
        t: i64,
    ) -> Result<DVector<f64>> {
        let u = self.pending_u.ok_or_else(|| {
            CoreError::config(format!(
                "deadbeat control requested at t={t} before any update"
            ))
        })?;
        Ok(DVector::from_element(1, u))
    }

    fn update(
        &mut self,
        phi: &Regressor,
        _y_next: &DVector<f64>,
        reference: &SignalSource,
        t: i64,
    ) -> Result<()> {
        let r2_t = pp_filtered_reference(&self.p_coeffs, reference, t);
        self.pending_u = Some(pp_control(&self.gain, &phi.flatten(), r2_t));
        Ok(())
    }

    fn bound_reference(&self, reference: &SignalSource, t: i64) -> DVector<f64> {
        DVector::from_element(1, pp_filtered_reference(&self.p_coeffs, reference, t))
    }

    fn first_input_from_init(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    #[test]
    fn filtered_reference_arithmetic() {
        // n = 1, p = 0.25, y*(t) = 4 -> r2 = 1.
        let reference = SignalSource::Constant { value: dvector![4.0] };
        assert!((pp_filtered_reference(&[0.25], &reference, 10) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_reference_gives_zero_r2() {
        let reference = SignalSource::Zero { dim: 1 };
        assert_eq!(pp_filtered_reference(&[0.3, -0.2], &reference, 5), 0.0);
    }

    #[test]
    fn performance_is_zero_on_all_zero_regressors() {
        assert_eq!(pp_performance(&[(1.0, 0.0), (2.0, 0.0)]), 0.0);
    }

    #[test]
    fn performance_is_zero_for_the_exact_model() {
        // Zero prediction errors on every step of the epoch.
        let pairs: Vec<(f64, f64)> = (1..=8).map(|k| (0.0, k as f64 * 0.5)).collect();
        assert_eq!(pp_performance(&pairs), 0.0);
    }

    #[test]
    fn performance_matches_enumeration() {
        let pairs = [(1.0, 2.0), (0.0, 0.0), (3.0, 4.0), (0.5, 0.1)];
        let expect = pairs
            .iter()
            .filter(|&&(_, p)| p > 0.0)
            .map(|&(e, p)| e / p)
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(pp_performance(&pairs), expect);
    }

    #[test]
    fn switch_ties_retain() {
        assert_eq!(pp_switch(0.1, 0.2, 2), 1);
        assert_eq!(pp_switch(0.2, 0.1, 1), 2);
        assert_eq!(pp_switch(0.1, 0.1, 2), 2);
    }

    #[test]
    fn control_is_gain_dot_phi_plus_reference() {
        let k = dvector![-0.25, -0.5];
        let phi = dvector![2.0, 4.0];
        assert!((pp_control(&k, &phi, 0.75) - (-0.5 - 2.0 + 0.75)).abs() < 1e-15);
    }

    #[test]
    fn epoch_length_must_cover_two_orders() {
        let set = ConvexParamSet::box_set(
            dvector![0.1, 0.5],
            dvector![0.9, 1.5],
        )
        .unwrap();
        let res = PpController::new(
            1,
            1,
            0,
            set.clone(),
            set,
            dvector![0.5, 1.0],
            dvector![0.5, 1.0],
            1,
        );
        assert!(matches!(res, Err(CoreError::Parameter { .. })));
    }
}
