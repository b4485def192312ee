//! Gain-bounded maps: functions `Γ` with `‖Γ(x)‖ ≤ ν‖x‖` for all `x`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::CoreError;
use crate::linalg::induced_norm;
use crate::Result;

#[derive(Debug, Clone)]
enum MapKind {
    Identity { dim: usize },
    Linear(DMatrix<f64>),
    /// Componentwise `x ↦ gain · tanh(x_i)`; gain-bounded since `|tanh(s)| ≤ |s|`.
    Tanh { dim: usize },
    /// Scalar output `x ↦ gain · ‖x‖`; attains its gain at every `x`.
    NormScalar { dim: usize },
    Zero { dim_in: usize, dim_out: usize },
}

/// A map from the regressor space to `R^p` with a declared gain bound.
#[derive(Debug, Clone)]
pub struct GainBoundedMap {
    kind: MapKind,
    declared_gain: f64,
}

impl GainBoundedMap {
    pub fn identity(dim: usize) -> Self {
        GainBoundedMap { kind: MapKind::Identity { dim }, declared_gain: 1.0 }
    }

    pub fn linear(matrix: DMatrix<f64>) -> Self {
        let gain = induced_norm(&matrix);
        GainBoundedMap { kind: MapKind::Linear(matrix), declared_gain: gain }
    }

    pub fn tanh(dim: usize, gain: f64) -> Self {
        GainBoundedMap { kind: MapKind::Tanh { dim }, declared_gain: gain }
    }

    pub fn norm_scalar(dim: usize, gain: f64) -> Self {
        GainBoundedMap { kind: MapKind::NormScalar { dim }, declared_gain: gain }
    }

    pub fn zero(dim_in: usize, dim_out: usize) -> Self {
        GainBoundedMap { kind: MapKind::Zero { dim_in, dim_out }, declared_gain: 0.0 }
    }

    pub fn input_dim(&self) -> usize {
        match &self.kind {
            MapKind::Identity { dim } => *dim,
            MapKind::Linear(m) => m.ncols(),
            MapKind::Tanh { dim } | MapKind::NormScalar { dim } => *dim,
            MapKind::Zero { dim_in, .. } => *dim_in,
        }
    }

    pub fn output_dim(&self) -> usize {
        match &self.kind {
            MapKind::Identity { dim } => *dim,
            MapKind::Linear(m) => m.nrows(),
            MapKind::Tanh { dim } => *dim,
            MapKind::NormScalar { .. } => 1,
            MapKind::Zero { dim_out, .. } => *dim_out,
        }
    }

    /// Declared gain `ν`.
    pub fn gain(&self) -> f64 {
        self.declared_gain
    }

    pub fn eval(&self, x: &DVector<f64>) -> DVector<f64> {
        match &self.kind {
            MapKind::Identity { .. } => x.clone(),
            MapKind::Linear(m) => m * x,
            MapKind::Tanh { .. } => x.map(|v| self.declared_gain * v.tanh()),
            MapKind::NormScalar { .. } => {
                DVector::from_element(1, self.declared_gain * x.norm())
            }
            MapKind::Zero { dim_out, .. } => DVector::zeros(*dim_out),
        }
    }

    /// Spot-check the gain bound by random sampling.
    ///
    /// Returns the worst observed `‖Γ(x)‖ / ‖x‖` if it exceeds the declared
    /// gain by more than `1e-9` relative.
    pub fn gain_violation<R: Rng>(&self, rng: &mut R, dim: usize, samples: usize) -> Option<f64> {
        let mut worst: Option<f64> = None;
        for _ in 0..samples {
            let scale = 10f64.powf(rng.random_range(-3.0..3.0));
            let x = DVector::from_fn(dim, |_, _| rng.random_range(-1.0..1.0)) * scale;
            let nx = x.norm();
            if nx == 0.0 {
                continue;
            }
            let ratio = self.eval(&x).norm() / nx;
            if ratio > self.declared_gain * (1.0 + 1e-9) {
                worst = Some(worst.map_or(ratio, |w: f64| w.max(ratio)));
            }
        }
        worst
    }

    pub(crate) fn validate_dims(&self, dim_in: usize, dim_out: usize) -> Result<()> {
        let ok = self.input_dim() == dim_in && self.output_dim() == dim_out;
        if ok {
            Ok(())
        } else {
            Err(CoreError::dim(format!(
                "map takes R^{} to R^{}, plant wiring needs R^{dim_in} to R^{dim_out}",
                self.input_dim(),
                self.output_dim()
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn identity_passes_through() {
        let f = GainBoundedMap::identity(2);
        assert_eq!(f.eval(&dvector![1.0, -2.0]), dvector![1.0, -2.0]);
        assert_eq!(f.gain(), 1.0);
    }

    #[test]
    fn maps_vanish_at_zero() {
        let maps = [
            GainBoundedMap::identity(3),
            GainBoundedMap::linear(DMatrix::from_row_slice(2, 3, &[1., 2., 3., 4., 5., 6.])),
            GainBoundedMap::tanh(3, 2.0),
            GainBoundedMap::norm_scalar(3, 0.5),
            GainBoundedMap::zero(3, 1),
        ];
        let zero = DVector::zeros(3);
        for f in &maps {
            assert_eq!(f.eval(&zero).norm(), 0.0);
        }
    }

    #[test]
    fn declared_gains_hold_under_sampling() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let maps = [
            GainBoundedMap::identity(4),
            GainBoundedMap::linear(DMatrix::from_row_slice(2, 4, &[
                0.3, -1.0, 0.2, 0.0, 1.5, 0.1, -0.4, 2.0,
            ])),
            GainBoundedMap::tanh(4, 1.7),
            GainBoundedMap::norm_scalar(4, 0.9),
        ];
        for f in &maps {
            assert!(f.gain_violation(&mut rng, 4, 500).is_none());
        }
    }

    #[test]
    fn norm_scalar_attains_its_gain() {
        let f = GainBoundedMap::norm_scalar(2, 0.5);
        let x = dvector![3.0, 4.0];
        assert!((f.eval(&x)[0] - 2.5).abs() < 1e-14);
    }
}
