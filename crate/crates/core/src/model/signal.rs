//! Pluggable exogenous signal sources.
//!
//! Sources are pure functions of the time index so that controllers may read
//! the reference ahead (one-step-ahead control) or behind (filtered
//! reference) without consuming generator state.

use nalgebra::DVector;

use crate::seeding;

/// A deterministic signal `t ↦ R^dim`.
#[derive(Debug, Clone)]
pub enum SignalSource {
    Zero { dim: usize },
    Constant { value: DVector<f64> },
    /// `amplitude · sin(2π(t−t_ref)/period + phase)` on every coordinate.
    Sinusoid { dim: usize, amplitude: f64, period: f64, phase: f64, t_ref: i64 },
    /// Seeded iid uniform draws in `[-amplitude, amplitude]` per coordinate.
    UniformNoise { dim: usize, amplitude: f64, seed: u64 },
}

impl SignalSource {
    pub fn dim(&self) -> usize {
        match self {
            SignalSource::Zero { dim } => *dim,
            SignalSource::Constant { value } => value.len(),
            SignalSource::Sinusoid { dim, .. } => *dim,
            SignalSource::UniformNoise { dim, .. } => *dim,
        }
    }

    pub fn value(&self, t: i64) -> DVector<f64> {
        match self {
            SignalSource::Zero { dim } => DVector::zeros(*dim),
            SignalSource::Constant { value } => value.clone(),
            SignalSource::Sinusoid { dim, amplitude, period, phase, t_ref } => {
                let arg =
                    std::f64::consts::TAU * ((t - t_ref) as f64) / period + phase;
                DVector::from_element(*dim, amplitude * arg.sin())
            }
            SignalSource::UniformNoise { dim, amplitude, seed } => {
                DVector::from_fn(*dim, |i, _| {
                    seeding::symmetric_uniform(*seed, t, i as u64, *amplitude)
                })
            }
        }
    }

    /// Uniform bound on `‖value(t)‖` over all `t`.
    pub fn amplitude_bound(&self) -> f64 {
        match self {
            SignalSource::Zero { .. } => 0.0,
            SignalSource::Constant { value } => value.norm(),
            SignalSource::Sinusoid { dim, amplitude, .. } => {
                amplitude.abs() * (*dim as f64).sqrt()
            }
            SignalSource::UniformNoise { dim, amplitude, .. } => {
                amplitude.abs() * (*dim as f64).sqrt()
            }
        }
    }
}
