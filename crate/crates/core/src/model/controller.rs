//! The two-part controller interface.
//!
//! A controller carries a state split into `z_1` (unconstrained) and `z_2`
//! (confined to a set `𝒳`), advanced by update maps and producing the input
//! through an output map:
//!
//! ```text
//! z_1(t+1) = g_1(z_1(t), z_2(t), φ(t), r(t))
//! z_2(t+1) = g_2(z_1(t), z_2(t), φ(t), r(t))        g_2 maps into 𝒳
//! u(t)     = h(z_1(t), z_2(t), φ(t), r(t))
//! ```
//!
//! The output map receives a [`PreRegressor`](crate::model::PreRegressor) —
//! `φ(t)` with the current-input slot masked — which resolves the algebraic
//! loop between `u(t)` and `φ(t)` exactly the way the concrete controllers
//! require (they read only the current output or strictly past data). The
//! adaptive controllers additionally consume the revealed `y(t+1)` in their
//! estimator updates, which the simulator supplies alongside `φ(t)`.

use nalgebra::{DMatrix, DVector};

use crate::model::{PreRegressor, Regressor, SignalSource};
use crate::Result;

/// A controller the closed-loop simulator can drive.
pub trait Controller {
    /// Output map `h`: the input `u(t)` from the masked regressor and the
    /// reference source. Called for every `t`, except `t_0` when
    /// [`first_input_from_init`](Controller::first_input_from_init) holds.
    fn control(&mut self, pre: &PreRegressor, reference: &SignalSource, t: i64)
        -> Result<DVector<f64>>;

    /// Advance `z_1`/`z_2` after `y(t+1)` is revealed.
    fn update(
        &mut self,
        phi: &Regressor,
        y_next: &DVector<f64>,
        reference: &SignalSource,
        t: i64,
    ) -> Result<()>;

    /// The exogenous signal `r(t)` entering the convolution bound for this
    /// controller (the raw reference for one-step-ahead control, the
    /// filtered reference for pole placement).
    fn bound_reference(&self, reference: &SignalSource, t: i64) -> DVector<f64>;

    /// Strictly proper controllers take `u(t_0)` from the initial window.
    fn first_input_from_init(&self) -> bool {
        false
    }

    /// Whether the output map would need the masked `u(t)` slot. The
    /// simulator refuses to run such a controller.
    fn requires_current_input(&self) -> bool {
        false
    }

    /// Current `z_1(t)`; empty for the controllers shipped here.
    fn z1(&self) -> DVector<f64> {
        DVector::zeros(0)
    }

    /// Active estimator index, for controllers that switch.
    fn sigma(&self) -> Option<u8> {
        None
    }

    /// Parameter estimates entering the current step, for trace recording.
    fn estimates(&self) -> Vec<DMatrix<f64>> {
        Vec::new()
    }

    /// Latest prediction errors, for trace recording.
    fn prediction_errors(&self) -> Vec<DVector<f64>> {
        Vec::new()
    }

    /// Distance of `z_2` to its constraint set `𝒳` (zero when stateless).
    fn z2_distance(&self) -> Result<f64> {
        Ok(0.0)
    }
}

/// Controller with `u ≡ 0`; the open-loop baseline.
#[derive(Debug, Clone, Default)]
pub struct ZeroController {
    input_dim: usize,
}

impl ZeroController {
    pub fn new(input_dim: usize) -> Self {
        ZeroController { input_dim }
    }
}

impl Controller for ZeroController {
    fn control(
        &mut self,
        _pre: &PreRegressor,
        _reference: &SignalSource,
        _t: i64,
    ) -> Result<DVector<f64>> {
        Ok(DVector::zeros(self.input_dim))
    }

    fn update(
        &mut self,
        _phi: &Regressor,
        _y_next: &DVector<f64>,
        _reference: &SignalSource,
        _t: i64,
    ) -> Result<()> {
        Ok(())
    }

    fn bound_reference(&self, reference: &SignalSource, t: i64) -> DVector<f64> {
        reference.value(t)
    }
}
