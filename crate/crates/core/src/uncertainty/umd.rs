//! Unmodelled-dynamics disturbances.
//!
//! The disturbance `d_Δ(t)` is constrained through an exponentially filtered
//! gain of the regressor:
//!
//! ```text
//! m(t+1)    = β m(t) + β |g(φ(t))|,     m(t_0) = m_0
//! ‖d_Δ(t)‖ ≤ μ m(t) + μ |g(φ(t))|.
//! ```
//!
//! The generator realizes `d_Δ` at the boundary of the class — magnitude
//! exactly `μ(m + |g(φ)|)` times a direction of norm at most one — so the
//! bound is stress-tested where it is tight.

use nalgebra::DVector;

use crate::error::CoreError;
use crate::model::{ClosedLoopTrace, GainBoundedMap};
use crate::seeding;
use crate::Result;

/// The `(β, μ, g, m_0)` data of the disturbance class.
#[derive(Debug, Clone)]
pub struct UnmodelledDynamicsSpec {
    pub beta: f64,
    pub mu: f64,
    pub g: GainBoundedMap,
    pub m0: f64,
}

impl UnmodelledDynamicsSpec {
    pub fn new(beta: f64, mu: f64, g: GainBoundedMap, m0: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(CoreError::param(format!("beta must lie in (0,1), got {beta}")));
        }
        if !(mu >= 0.0) || !mu.is_finite() {
            return Err(CoreError::param(format!("mu must be finite and >= 0, got {mu}")));
        }
        if !(m0 >= 0.0) || !m0.is_finite() {
            return Err(CoreError::param(format!("m0 must be finite and >= 0, got {m0}")));
        }
        if g.output_dim() != 1 {
            return Err(CoreError::dim("unmodelled-dynamics map g must be scalar-valued"));
        }
        Ok(UnmodelledDynamicsSpec { beta, mu, g, m0 })
    }

    /// `|g(φ)|`.
    pub fn g_abs(&self, phi_flat: &DVector<f64>) -> f64 {
        self.g.eval(phi_flat)[0].abs()
    }
}

/// The auxiliary filter state `m(t) ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UmdState {
    pub m: f64,
}

impl UmdState {
    pub fn new(m0: f64) -> Self {
        UmdState { m: m0 }
    }
}

/// One filter step: `m⁺ = β m + β |g(φ)|` exactly.
pub fn umd_step(spec: &UnmodelledDynamicsSpec, state: UmdState, phi_flat: &DVector<f64>) -> UmdState {
    UmdState { m: spec.beta * state.m + spec.beta * spec.g_abs(phi_flat) }
}

/// Direction of the realized disturbance.
#[derive(Debug, Clone)]
pub enum DirectionSource {
    /// Fixed direction; clamped to unit norm if longer (and flagged).
    Constant { value: DVector<f64> },
    /// Seeded uniform direction on the unit sphere, stateless in `t`.
    Random { dim: usize, seed: u64 },
    /// Aligned with the current output block of `φ(t)`, pushing the loop
    /// away from rest.
    AdversarialSign { dim: usize },
}

impl DirectionSource {
    /// Direction at time `t`; returns `(direction, was_clamped)`.
    pub fn value(&self, t: i64, y_now: &DVector<f64>) -> (DVector<f64>, bool) {
        match self {
            DirectionSource::Constant { value } => {
                let n = value.norm();
                if n > 1.0 {
                    (value / n, true)
                } else {
                    (value.clone(), false)
                }
            }
            DirectionSource::Random { dim, seed } => {
                let mut v = DVector::from_fn(*dim, |i, _| {
                    seeding::symmetric_uniform(*seed, t, i as u64, 1.0)
                });
                let n = v.norm();
                if n > 1e-9 {
                    v /= n;
                } else {
                    v = unit_first(*dim);
                }
                (v, false)
            }
            DirectionSource::AdversarialSign { dim } => {
                let n = y_now.norm();
                if n > 1e-12 {
                    (y_now / n, false)
                } else {
                    (unit_first(*dim), false)
                }
            }
        }
    }
}

fn unit_first(dim: usize) -> DVector<f64> {
    let mut v = DVector::zeros(dim);
    if dim > 0 {
        v[0] = 1.0;
    }
    v
}

/// Realize the disturbance `d_Δ(t) = μ (m(t) + |g(φ(t))|) · dir(t)`.
///
/// With `‖dir‖ ≤ 1` the class bound holds by construction; directions longer
/// than one are clamped and reported.
pub fn umd_disturbance(
    spec: &UnmodelledDynamicsSpec,
    state: UmdState,
    phi_flat: &DVector<f64>,
    y_now: &DVector<f64>,
    direction: &DirectionSource,
    t: i64,
) -> (DVector<f64>, bool) {
    let (dir, clamped) = direction.value(t, y_now);
    let magnitude = spec.mu * (state.m + spec.g_abs(phi_flat));
    (dir * magnitude, clamped)
}

/// Everything the simulator needs to inject unmodelled dynamics.
#[derive(Debug, Clone)]
pub struct UmdSetup {
    pub spec: UnmodelledDynamicsSpec,
    pub direction: DirectionSource,
}

/// Kind of discrepancy found by [`verify_umd_bound`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UmdViolation {
    /// `‖d_Δ(t)‖` exceeds `μ m(t) + μ |g(φ(t))|`.
    BoundExceeded,
    /// The recorded `m(t)` differs from the recursion replayed from `m_0`.
    StateMismatch,
}

/// Verifier outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct UmdCheck {
    pub ok: bool,
    pub first_violation: Option<(i64, UmdViolation)>,
}

/// Replay the filter recursion from `m_0` over the recorded regressors and
/// check the disturbance bound at every step against the replayed state.
pub fn verify_umd_bound(trace: &ClosedLoopTrace, spec: &UnmodelledDynamicsSpec) -> UmdCheck {
    let mut state = UmdState::new(spec.m0);
    for step in &trace.steps {
        let g_abs = spec.g_abs(&step.phi);
        let state_tol = 1e-9 * (1.0 + state.m.abs());
        if (step.m_umd - state.m).abs() > state_tol {
            return UmdCheck { ok: false, first_violation: Some((step.t, UmdViolation::StateMismatch)) };
        }
        let bound = spec.mu * state.m + spec.mu * g_abs;
        let slack = 1e-12 * (1.0 + bound);
        if step.d_umd.norm() > bound + slack {
            return UmdCheck { ok: false, first_violation: Some((step.t, UmdViolation::BoundExceeded)) };
        }
        state = umd_step(spec, state, &step.phi);
    }
    UmdCheck { ok: true, first_violation: None }
}
