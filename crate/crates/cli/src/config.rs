//! JSON configuration schema (version 1).
//!
//! Configs are plain data; [`crate::scenario`] turns them into core objects
//! after validation. All randomness derives from the top-level `seed` through
//! fixed per-source labels, so replacing one source leaves the draws of the
//! others untouched.

use serde::{Deserialize, Serialize};

use convcert_core::analysis::StateKind;

/// Supported config schema version.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub schema: u32,
    /// Master seed; per-source streams derive from it by label.
    pub seed: u64,
    pub plant: PlantConfig,
    pub controller: ControllerConfig,
    pub theta_star: ThetaConfig,
    pub disturbance: SignalConfig,
    pub reference: SignalConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub umd: Option<UmdConfig>,
    pub horizon: HorizonConfig,
    pub init: InitConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certify: Option<CertifyConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlantConfig {
    pub n_y: usize,
    pub n_u: usize,
    pub output_dim: usize,
    pub input_dim: usize,
    pub param_rows: usize,
    pub f: MapConfig,
    pub parameter_set: SetConfig,
}

impl PlantConfig {
    pub fn regressor_dim(&self) -> usize {
        self.n_y * self.output_dim + self.n_u * self.input_dim
    }
}

/// Gain-bounded map selection; dimensions come from the surrounding wiring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapConfig {
    Identity,
    /// Row-major matrix.
    Linear { rows: usize, cols: usize, data: Vec<f64> },
    Tanh { gain: f64 },
    Norm { gain: f64 },
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetConfig {
    Box { lower: Vec<f64>, upper: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    Polytope { normals: Vec<Vec<f64>>, offsets: Vec<f64> },
    Union { members: Vec<SetConfig> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ControllerConfig {
    /// `u ≡ 0`, the open-loop baseline.
    Zero,
    /// Known-parameter pole placement at the fixed true parameters.
    Deadbeat,
    /// First-order one-step-ahead switching controller.
    Osa {
        set1: SetConfig,
        set2: SetConfig,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta1_init: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta2_init: Option<Vec<f64>>,
        sigma0: u8,
    },
    /// n-th order pole-placement switching controller.
    PolePlacement {
        order: usize,
        epoch_len: usize,
        set1: SetConfig,
        set2: SetConfig,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta1_init: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta2_init: Option<Vec<f64>>,
        sigma0: u8,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ThetaConfig {
    /// Constant parameters, row-major `p × r`.
    Fixed { value: Vec<f64> },
    /// Drawn from the admissible time-variation class over the plant's
    /// parameter set (stream label `theta`).
    Tv { c0: f64, epsilon: f64, mode: TvModeConfig },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TvModeConfig {
    Constant,
    Drift,
    Jumps,
    DriftJumps,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SignalConfig {
    Zero,
    Constant { value: Vec<f64> },
    Sinusoid { amplitude: f64, period: f64, phase: f64 },
    Noise { amplitude: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UmdConfig {
    pub beta: f64,
    pub mu: f64,
    pub m0: f64,
    pub g: MapConfig,
    pub direction: DirectionConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DirectionConfig {
    Constant { value: Vec<f64> },
    Random,
    Adversarial,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HorizonConfig {
    pub t0: i64,
    pub steps: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InitConfig {
    /// Flattened initial window `[y(t0)…y(t0−n_y+1); u(t0)…u(t0−n_u+1)]`.
    pub phi0: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertifyConfig {
    pub lambdas: Vec<f64>,
    pub state_kind: StateKind,
    /// Check this gain when present; fit the minimal gain otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub schema: u32,
    pub scenario: ScenarioConfig,
    pub sweep: SweepAxis,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepAxis {
    pub parameter: SweepParameter,
    pub grid: Vec<f64>,
    pub seeds_per_point: u64,
    /// Decay rate at which the per-run minimal gain is fitted.
    pub fit_lambda: f64,
    pub state_kind: StateKind,
    /// Headline per-point statistic.
    #[serde(default)]
    pub reduction: SweepReduction,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepReduction {
    #[default]
    MaxFittedC,
    DivergenceFraction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// Drift rate of the time-variation class.
    Epsilon,
    /// Jump budget of the time-variation class.
    C0,
    /// Unmodelled-dynamics size.
    Mu,
    /// Pole-placement epoch length (rounded to an integer).
    EpochLen,
    /// Disturbance source amplitude.
    Amplitude,
}

/// Inputs for the margin computations, as a standalone config.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MarginsConfig {
    pub schema: u32,
    pub c: f64,
    pub lambda: f64,
    pub lambda1: f64,
    pub c0: f64,
    pub f_gain: f64,
    pub s_norm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_gain: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda2: Option<f64>,
}
