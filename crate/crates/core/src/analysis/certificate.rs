//! Convolution-bound verification and minimal-gain fitting.
//!
//! A pair `(c, λ)` certifies a trace when, for every `t ≥ τ ≥ t_0`,
//!
//! ```text
//! ‖x(t)‖ ≤ c λ^{t−τ} ‖x(τ)‖ + Σ_{j=τ}^{t−1} c λ^{t−j−1} (‖r(j)‖ + ‖w(j)‖) + c ‖r(t)‖
//! ```
//!
//! with `x` the stacked `[φ; z_1]` state (optionally extended by the
//! unmodelled-dynamics filter state `m`). The checker sweeps every start
//! `τ` and evaluates the weighted sum incrementally, so the full pair loop
//! costs O(T²). Fitting inverts the same expression: the minimal gain is the
//! worst ratio of state norm to the right side evaluated at `c = 1`.

use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::model::ClosedLoopTrace;
use crate::Result;

/// Which state stack the bound is evaluated on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    /// `x = [φ; z_1]`.
    PhiZ1,
    /// `x = [φ; z_1; m]`, the extended stack of the unmodelled-dynamics bound.
    PhiZ1M,
}

/// Outcome of a bound check on one trace.
#[derive(Debug, Clone, Serialize)]
pub struct BoundCertificate {
    pub c: f64,
    pub lambda: f64,
    pub state_kind: StateKind,
    pub verified: bool,
    /// Max over pairs of `‖x(t)‖ − RHS(τ, t)`.
    pub max_slack: f64,
    /// `(τ, t)` attaining `max_slack`.
    pub worst_pair: (i64, i64),
}

fn state_norms(trace: &ClosedLoopTrace, kind: StateKind) -> Vec<f64> {
    (0..trace.len())
        .map(|i| match kind {
            StateKind::PhiZ1 => trace.phi_z1_norm(i),
            StateKind::PhiZ1M => trace.phi_z1_m_norm(i),
        })
        .collect()
}

fn drive_norms(trace: &ClosedLoopTrace) -> (Vec<f64>, Vec<f64>) {
    let r: Vec<f64> = trace.steps.iter().map(|s| s.r.norm()).collect();
    let w: Vec<f64> = trace.steps.iter().map(|s| s.w.norm()).collect();
    (r, w)
}

fn validate_params(c: f64, lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(CoreError::param(format!("decay rate must lie in (0,1), got {lambda}")));
    }
    if !(c >= 1.0) || !c.is_finite() {
        return Err(CoreError::param(format!("gain must be finite and >= 1, got {c}")));
    }
    Ok(())
}

/// Verify the bound for every pair `t ≥ τ ≥ t_0`.
///
/// Tolerance is pure floating-point slack: a pair passes when
/// `LHS ≤ RHS·(1 + 1e−9) + 1e−12·scale` with `scale = max_t ‖x(t)‖`.
pub fn check_convolution_bound(
    trace: &ClosedLoopTrace,
    c: f64,
    lambda: f64,
    state_kind: StateKind,
) -> Result<BoundCertificate> {
    check_bound_impl(trace, c, lambda, state_kind, PairRange::AllPairs)
}

/// The extended-state variant: same inequality on `[φ; z_1; m]` with the
/// start pinned to `t_0` (the unmodelled-dynamics guarantee is stated from
/// the initial time only).
pub fn check_umd_closed_loop_bound(
    trace: &ClosedLoopTrace,
    c2: f64,
    lambda2: f64,
) -> Result<BoundCertificate> {
    check_bound_impl(trace, c2, lambda2, StateKind::PhiZ1M, PairRange::FromStart)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum PairRange {
    AllPairs,
    FromStart,
}

fn check_bound_impl(
    trace: &ClosedLoopTrace,
    c: f64,
    lambda: f64,
    state_kind: StateKind,
    range: PairRange,
) -> Result<BoundCertificate> {
    validate_params(c, lambda)?;
    if trace.is_empty() {
        return Err(CoreError::param("cannot certify an empty trace"));
    }
    let x = state_norms(trace, state_kind);
    let (r, w) = drive_norms(trace);
    let scale = x.iter().fold(0.0f64, |a, &b| a.max(b));
    let abs_tol = 1e-12 * scale;

    let mut verified = true;
    let mut max_slack = f64::NEG_INFINITY;
    let mut worst_pair = (trace.t0, trace.t0);

    let starts: Box<dyn Iterator<Item = usize>> = match range {
        PairRange::AllPairs => Box::new(0..trace.len()),
        PairRange::FromStart => Box::new(std::iter::once(0)),
    };
    for tau in starts {
        let mut decay = 1.0; // λ^{t−τ}
        let mut conv = 0.0; // Σ λ^{t−j−1}(‖r(j)‖+‖w(j)‖)
        for t in tau..trace.len() {
            if t > tau {
                conv = lambda * conv + (r[t - 1] + w[t - 1]);
                decay *= lambda;
            }
            let rhs = c * decay * x[tau] + c * conv + c * r[t];
            let slack = x[t] - rhs;
            if slack > max_slack {
                max_slack = slack;
                worst_pair = (trace.t0 + tau as i64, trace.t0 + t as i64);
            }
            if x[t] > rhs * (1.0 + 1e-9) + abs_tol {
                verified = false;
            }
        }
    }

    Ok(BoundCertificate { c, lambda, state_kind, verified, max_slack, worst_pair })
}

/// Fit the minimal gain for a given decay rate over all pairs.
///
/// `c_min = max over pairs of ‖x(t)‖ / D(τ, t)` with `D` the bound right
/// side at `c = 1`, clamped below at 1. Pairs with `D = 0` and a zero state
/// contribute nothing; `D = 0` against a positive state norm means no finite
/// gain works and is reported as unfittable.
pub fn fit_minimal_gain(
    trace: &ClosedLoopTrace,
    lambda: f64,
    state_kind: StateKind,
) -> Result<f64> {
    fit_impl(trace, lambda, state_kind, PairRange::AllPairs)
}

/// Minimal gain for the extended-state bound anchored at `t_0`.
pub fn fit_umd_minimal_gain(trace: &ClosedLoopTrace, lambda2: f64) -> Result<f64> {
    fit_impl(trace, lambda2, StateKind::PhiZ1M, PairRange::FromStart)
}

fn fit_impl(
    trace: &ClosedLoopTrace,
    lambda: f64,
    state_kind: StateKind,
    range: PairRange,
) -> Result<f64> {
    validate_params(1.0, lambda)?;
    if trace.is_empty() {
        return Err(CoreError::param("cannot fit an empty trace"));
    }
    let x = state_norms(trace, state_kind);
    let (r, w) = drive_norms(trace);

    let mut c_min = 1.0f64;
    let starts: Box<dyn Iterator<Item = usize>> = match range {
        PairRange::AllPairs => Box::new(0..trace.len()),
        PairRange::FromStart => Box::new(std::iter::once(0)),
    };
    for tau in starts {
        let mut decay = 1.0;
        let mut conv = 0.0;
        for t in tau..trace.len() {
            if t > tau {
                conv = lambda * conv + (r[t - 1] + w[t - 1]);
                decay *= lambda;
            }
            let denom = decay * x[tau] + conv + r[t];
            if denom == 0.0 {
                if x[t] > 0.0 {
                    return Err(CoreError::Unfittable {
                        tau: trace.t0 + tau as i64,
                        t: trace.t0 + t as i64,
                    });
                }
                continue;
            }
            c_min = c_min.max(x[t] / denom);
        }
    }
    Ok(c_min)
}

/// Minimal gain per decay rate over a grid; the gain–decay trade-off curve.
///
/// The fitted gain is non-increasing in `λ` (each right-side term is
/// non-decreasing in `λ`); the implementation checks this and treats a
/// violation beyond floating-point slack as an internal error.
pub fn fit_gain_decay_frontier(
    trace: &ClosedLoopTrace,
    lambda_grid: &[f64],
    state_kind: StateKind,
) -> Result<Vec<(f64, f64)>> {
    if lambda_grid.is_empty() {
        return Err(CoreError::param("lambda grid is empty"));
    }
    let mut sorted = lambda_grid.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite lambdas"));
    let mut out = Vec::with_capacity(sorted.len());
    let mut prev: Option<f64> = None;
    for &lambda in &sorted {
        let c_min = fit_minimal_gain(trace, lambda, state_kind)?;
        if let Some(p) = prev {
            if c_min > p * (1.0 + 1e-9) {
                return Err(CoreError::Internal {
                    message: format!(
                        "frontier not monotone: c({lambda}) = {c_min} exceeds previous {p}"
                    ),
                });
            }
        }
        prev = Some(c_min);
        out.push((lambda, c_min));
    }
    Ok(out)
}
