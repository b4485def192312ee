//! The finite-memory plant `y(t+1) = θᵀ f(φ(t)) + w(t) + d_Δ(t)`.

use nalgebra::{DMatrix, DVector};

use crate::error::CoreError;
use crate::estimation::ParameterSet;
use crate::model::{GainBoundedMap, Regressor};
use crate::Result;

/// Plant structure: window lengths, signal dimensions, the gain-bounded map
/// `f`, and the admissible parameter region `𝒮 ⊂ R^{p×r}`.
#[derive(Debug, Clone)]
pub struct PlantSpec {
    pub n_y: usize,
    pub n_u: usize,
    /// Output dimension `r`.
    pub output_dim: usize,
    /// Input dimension `m`.
    pub input_dim: usize,
    /// Parameter row dimension `p` (the output dimension of `f`).
    pub param_rows: usize,
    pub f: GainBoundedMap,
    pub parameter_set: ParameterSet,
}

impl PlantSpec {
    /// `n_y·r + n_u·m`, the flattened regressor length.
    pub fn regressor_dim(&self) -> usize {
        self.n_y * self.output_dim + self.n_u * self.input_dim
    }

    /// Check the internal wiring: `f: R^{n_y·r+n_u·m} → R^p` and the
    /// parameter set lives in the flattened `R^{p·r}`.
    pub fn validate(&self) -> Result<()> {
        if self.n_y == 0 || self.n_u == 0 || self.output_dim == 0 || self.input_dim == 0 {
            return Err(CoreError::dim("plant window lengths and dimensions must be positive"));
        }
        self.f.validate_dims(self.regressor_dim(), self.param_rows)?;
        let set_dim = self.parameter_set.dim();
        let expect = self.param_rows * self.output_dim;
        if set_dim != expect {
            return Err(CoreError::dim(format!(
                "parameter set lives in R^{set_dim}, plant parameters flatten to R^{expect}"
            )));
        }
        Ok(())
    }

    /// Sup-norm bound of the parameter region.
    pub fn parameter_norm_bound(&self) -> f64 {
        self.parameter_set.norm_bound()
    }
}

/// One plant step: `y(t+1) = θᵀ f(φ(t)) + w(t) + d(t)` exactly.
pub fn plant_step(
    spec: &PlantSpec,
    theta: &DMatrix<f64>,
    phi: &Regressor,
    w: &DVector<f64>,
    d: &DVector<f64>,
) -> Result<DVector<f64>> {
    if theta.nrows() != spec.param_rows || theta.ncols() != spec.output_dim {
        return Err(CoreError::dim(format!(
            "theta is {}x{}, plant expects {}x{}",
            theta.nrows(),
            theta.ncols(),
            spec.param_rows,
            spec.output_dim
        )));
    }
    if phi.dim() != spec.regressor_dim() {
        return Err(CoreError::dim(format!(
            "regressor has length {}, plant expects {}",
            phi.dim(),
            spec.regressor_dim()
        )));
    }
    if w.len() != spec.output_dim || d.len() != spec.output_dim {
        return Err(CoreError::dim("disturbance dimension differs from output dimension"));
    }
    let fx = spec.f.eval(&phi.flatten());
    Ok(theta.transpose() * fx + w + d)
}
