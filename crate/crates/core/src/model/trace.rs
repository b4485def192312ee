//! Time-indexed closed-loop trace and its CSV export.

use std::io::Write;

use nalgebra::{DMatrix, DVector};

use crate::model::{assemble_regressor, SignalHistory};
use crate::Result;

/// Everything recorded at one time step.
#[derive(Debug, Clone)]
pub struct TraceStep {
    pub t: i64,
    pub y: DVector<f64>,
    pub u: DVector<f64>,
    /// Flattened `φ(t)`.
    pub phi: DVector<f64>,
    pub z1: DVector<f64>,
    pub w: DVector<f64>,
    /// The bound reference `r(t)` reported by the controller.
    pub r: DVector<f64>,
    pub d_umd: DVector<f64>,
    pub m_umd: f64,
    pub sigma: Option<u8>,
    pub theta_star: DMatrix<f64>,
    pub theta_hat: Vec<DMatrix<f64>>,
    pub pred_err: Vec<DVector<f64>>,
    pub dir_clamped: bool,
}

/// Record of a closed-loop run.
#[derive(Debug, Clone)]
pub struct ClosedLoopTrace {
    pub t0: i64,
    pub n_y: usize,
    pub n_u: usize,
    pub output_dim: usize,
    pub input_dim: usize,
    pub steps: Vec<TraceStep>,
    /// Time at which `‖φ‖` crossed the overflow threshold, if it did.
    pub divergence: Option<i64>,
    /// First time the controller's `z_2` left its constraint set, if ever.
    pub z2_violation: Option<i64>,
}

impl ClosedLoopTrace {
    pub fn new(t0: i64, n_y: usize, n_u: usize, output_dim: usize, input_dim: usize) -> Self {
        ClosedLoopTrace {
            t0,
            n_y,
            n_u,
            output_dim,
            input_dim,
            steps: Vec::new(),
            divergence: None,
            z2_violation: None,
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn diverged(&self) -> bool {
        self.divergence.is_some()
    }

    /// `‖[φ(t); z_1(t)]‖` at a step index.
    pub fn phi_z1_norm(&self, idx: usize) -> f64 {
        let s = &self.steps[idx];
        (s.phi.norm_squared() + s.z1.norm_squared()).sqrt()
    }

    /// `‖[φ(t); z_1(t); m(t)]‖` at a step index.
    pub fn phi_z1_m_norm(&self, idx: usize) -> f64 {
        let s = &self.steps[idx];
        (s.phi.norm_squared() + s.z1.norm_squared() + s.m_umd * s.m_umd).sqrt()
    }

    /// Re-derive every regressor from the recorded output/input histories and
    /// compare against the recorded `φ(t)`; returns the first discrepancy.
    pub fn check_consistency(&self) -> std::result::Result<(), String> {
        let mut y_hist = SignalHistory::new(self.t0 - self.n_y as i64 + 1);
        let mut u_hist = SignalHistory::new(self.t0 - self.n_u as i64 + 1);
        if let Some(first) = self.steps.first() {
            // Seed the pre-t0 part of the windows from φ(t0) itself.
            for k in (1..self.n_y).rev() {
                let off = k * self.output_dim;
                y_hist.push(DVector::from_column_slice(
                    &first.phi.as_slice()[off..off + self.output_dim],
                ));
            }
            let u_base = self.n_y * self.output_dim;
            for k in (1..self.n_u).rev() {
                let off = u_base + k * self.input_dim;
                u_hist.push(DVector::from_column_slice(
                    &first.phi.as_slice()[off..off + self.input_dim],
                ));
            }
        }
        for step in &self.steps {
            y_hist.push(step.y.clone());
            u_hist.push(step.u.clone());
            let phi = assemble_regressor(&y_hist, &u_hist, step.t, self.n_y, self.n_u)
                .map_err(|e| format!("t={}: {e}", step.t))?;
            if phi.flatten() != step.phi {
                return Err(format!("t={}: recorded regressor differs from windows", step.t));
            }
        }
        Ok(())
    }

    /// CSV export: one row per step, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let mut header = vec!["t".to_string()];
        for i in 0..self.output_dim {
            header.push(format!("y_{i}"));
        }
        for i in 0..self.input_dim {
            header.push(format!("u_{i}"));
        }
        for i in 0..self.output_dim {
            header.push(format!("w_{i}"));
        }
        for i in 0..self.output_dim {
            header.push(format!("r_{i}"));
        }
        header.push("sigma".into());
        header.push("m_umd".into());
        header.push("norm_phi_z1".into());
        writeln!(out, "{}", header.join(",")).map_err(io_err)?;

        for (idx, step) in self.steps.iter().enumerate() {
            let mut row = vec![step.t.to_string()];
            for v in [&step.y, &step.u, &step.w, &step.r] {
                for x in v.iter() {
                    row.push(fmt_f64(*x));
                }
            }
            row.push(step.sigma.map_or(0, |s| s as i64).to_string());
            row.push(fmt_f64(step.m_umd));
            row.push(fmt_f64(self.phi_z1_norm(idx)));
            writeln!(out, "{}", row.join(",")).map_err(io_err)?;
        }
        Ok(())
    }
}

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn io_err(e: std::io::Error) -> crate::CoreError {
    crate::CoreError::Internal { message: format!("trace write failed: {e}") }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    fn scalar_step(t: i64, y: f64, u: f64, phi: Vec<f64>) -> TraceStep {
        TraceStep {
            t,
            y: dvector![y],
            u: dvector![u],
            phi: DVector::from_vec(phi),
            z1: DVector::zeros(0),
            w: dvector![0.0],
            r: dvector![0.0],
            d_umd: dvector![0.0],
            m_umd: 0.0,
            sigma: None,
            theta_star: DMatrix::zeros(2, 1),
            theta_hat: vec![],
            pred_err: vec![],
            dir_clamped: false,
        }
    }

    #[test]
    fn consistency_check_accepts_shifted_windows() {
        let mut trace = ClosedLoopTrace::new(0, 2, 1, 1, 1);
        // phi(t) = [y(t), y(t-1), u(t)] with y(-1) = 9 seeded from phi(0).
        trace.steps.push(scalar_step(0, 1.0, 5.0, vec![1.0, 9.0, 5.0]));
        trace.steps.push(scalar_step(1, 2.0, 6.0, vec![2.0, 1.0, 6.0]));
        trace.steps.push(scalar_step(2, 3.0, 7.0, vec![3.0, 2.0, 7.0]));
        assert!(trace.check_consistency().is_ok());
    }

    #[test]
    fn consistency_check_flags_corruption() {
        let mut trace = ClosedLoopTrace::new(0, 1, 1, 1, 1);
        trace.steps.push(scalar_step(0, 1.0, 0.0, vec![1.0, 0.0]));
        trace.steps.push(scalar_step(1, 2.0, 0.0, vec![2.5, 0.0]));
        assert!(trace.check_consistency().is_err());
    }

    #[test]
    fn csv_has_header_and_17_digit_floats() {
        let mut trace = ClosedLoopTrace::new(0, 1, 1, 1, 1);
        trace.steps.push(scalar_step(0, 1.0 / 3.0, 0.0, vec![1.0 / 3.0, 0.0]));
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,y_0,u_0,w_0,r_0,sigma,m_umd,norm_phi_z1");
        let row = lines.next().unwrap();
        assert!(row.starts_with("0,3.3333333333333331e-1,"));
    }
}
