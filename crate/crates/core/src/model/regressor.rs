//! The stacked input-output data window `φ(t)` and its assembly.

use nalgebra::DVector;

use crate::error::CoreError;
use crate::Result;

/// The regression vector
/// `φ(t) = [y(t); …; y(t−n_y+1); u(t); …; u(t−n_u+1)]`,
/// stored as windows with the most recent sample first.
#[derive(Debug, Clone, PartialEq)]
pub struct Regressor {
    pub y_window: Vec<DVector<f64>>,
    pub u_window: Vec<DVector<f64>>,
}

impl Regressor {
    pub fn new(y_window: Vec<DVector<f64>>, u_window: Vec<DVector<f64>>) -> Result<Self> {
        if y_window.is_empty() || u_window.is_empty() {
            return Err(CoreError::dim("regressor windows must be nonempty"));
        }
        let r = y_window[0].len();
        let m = u_window[0].len();
        if y_window.iter().any(|v| v.len() != r) || u_window.iter().any(|v| v.len() != m) {
            return Err(CoreError::dim("ragged regressor window"));
        }
        Ok(Regressor { y_window, u_window })
    }

    /// Build from a flattened vector in stacking order.
    pub fn from_flat(
        flat: &DVector<f64>,
        n_y: usize,
        n_u: usize,
        output_dim: usize,
        input_dim: usize,
    ) -> Result<Self> {
        let expect = n_y * output_dim + n_u * input_dim;
        if flat.len() != expect {
            return Err(CoreError::dim(format!(
                "flat regressor has length {}, layout needs {expect}",
                flat.len()
            )));
        }
        let mut y_window = Vec::with_capacity(n_y);
        let mut k = 0;
        for _ in 0..n_y {
            y_window.push(DVector::from_column_slice(&flat.as_slice()[k..k + output_dim]));
            k += output_dim;
        }
        let mut u_window = Vec::with_capacity(n_u);
        for _ in 0..n_u {
            u_window.push(DVector::from_column_slice(&flat.as_slice()[k..k + input_dim]));
            k += input_dim;
        }
        Regressor::new(y_window, u_window)
    }

    pub fn n_y(&self) -> usize {
        self.y_window.len()
    }

    pub fn n_u(&self) -> usize {
        self.u_window.len()
    }

    pub fn output_dim(&self) -> usize {
        self.y_window[0].len()
    }

    pub fn input_dim(&self) -> usize {
        self.u_window[0].len()
    }

    /// Flattened length `n_y·r + n_u·m`.
    pub fn dim(&self) -> usize {
        self.n_y() * self.output_dim() + self.n_u() * self.input_dim()
    }

    /// Most recent output `y(t)`.
    pub fn y_now(&self) -> &DVector<f64> {
        &self.y_window[0]
    }

    /// Most recent input `u(t)`.
    pub fn u_now(&self) -> &DVector<f64> {
        &self.u_window[0]
    }

    /// Stack the windows in order.
    pub fn flatten(&self) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim());
        let mut k = 0;
        for y in &self.y_window {
            out.rows_mut(k, y.len()).copy_from(y);
            k += y.len();
        }
        for u in &self.u_window {
            out.rows_mut(k, u.len()).copy_from(u);
            k += u.len();
        }
        out
    }

    pub fn norm(&self) -> f64 {
        self.flatten().norm()
    }

    /// The window one step ahead, before the new input is known:
    /// `y(t+1)` enters the output window while the input window holds only
    /// the `n_u − 1` past inputs.
    pub fn advance(&self, y_next: DVector<f64>) -> PreRegressor {
        let mut y_window = Vec::with_capacity(self.n_y());
        y_window.push(y_next);
        y_window.extend(self.y_window[..self.n_y() - 1].iter().cloned());
        let u_past = self.u_window[..self.n_u() - 1].to_vec();
        PreRegressor { y_window, u_past, input_dim: self.input_dim() }
    }

    /// This window with the current-input slot masked.
    pub fn mask_current_input(&self) -> PreRegressor {
        PreRegressor {
            y_window: self.y_window.clone(),
            u_past: self.u_window[1..].to_vec(),
            input_dim: self.input_dim(),
        }
    }
}

/// `φ(t)` with the current-input slot masked.
///
/// The output map `h` receives this (never the complete `φ(t)`) so that a
/// controller cannot read the very input it is computing.
#[derive(Debug, Clone, PartialEq)]
pub struct PreRegressor {
    pub y_window: Vec<DVector<f64>>,
    /// Past inputs `u(t−1), …, u(t−n_u+1)`; empty when `n_u = 1`.
    pub u_past: Vec<DVector<f64>>,
    input_dim: usize,
}

impl PreRegressor {
    /// Most recent output `y(t)`.
    pub fn y_now(&self) -> &DVector<f64> {
        &self.y_window[0]
    }

    /// Fill in `u(t)` to obtain the complete regressor.
    pub fn complete(&self, u_now: DVector<f64>) -> Result<Regressor> {
        if u_now.len() != self.input_dim {
            return Err(CoreError::dim(format!(
                "input has dimension {}, plant expects {}",
                u_now.len(),
                self.input_dim
            )));
        }
        let mut u_window = Vec::with_capacity(self.u_past.len() + 1);
        u_window.push(u_now);
        u_window.extend(self.u_past.iter().cloned());
        Regressor::new(self.y_window.clone(), u_window)
    }
}

/// A time-indexed signal record with a fixed start time.
#[derive(Debug, Clone, Default)]
pub struct SignalHistory {
    start: i64,
    entries: Vec<DVector<f64>>,
}

impl SignalHistory {
    pub fn new(start: i64) -> Self {
        SignalHistory { start, entries: Vec::new() }
    }

    pub fn push(&mut self, value: DVector<f64>) {
        self.entries.push(value);
    }

    pub fn get(&self, t: i64) -> Option<&DVector<f64>> {
        if t < self.start {
            return None;
        }
        self.entries.get((t - self.start) as usize)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn start(&self) -> i64 {
        self.start
    }
}

/// Stack the windows ending at time `t` into a regressor.
///
/// Requires `n_y` outputs and `n_u` inputs ending at `t` to be present in the
/// histories; otherwise an initialization error is returned.
pub fn assemble_regressor(
    y_hist: &SignalHistory,
    u_hist: &SignalHistory,
    t: i64,
    n_y: usize,
    n_u: usize,
) -> Result<Regressor> {
    let mut y_window = Vec::with_capacity(n_y);
    for k in 0..n_y {
        let tau = t - k as i64;
        let v = y_hist.get(tau).ok_or(CoreError::InsufficientHistory {
            needed: n_y,
            have: y_hist.len(),
            t,
        })?;
        y_window.push(v.clone());
    }
    let mut u_window = Vec::with_capacity(n_u);
    for k in 0..n_u {
        let tau = t - k as i64;
        let v = u_hist.get(tau).ok_or(CoreError::InsufficientHistory {
            needed: n_u,
            have: u_hist.len(),
            t,
        })?;
        u_window.push(v.clone());
    }
    Regressor::new(y_window, u_window)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    fn hist(start: i64, scalars: &[f64]) -> SignalHistory {
        let mut h = SignalHistory::new(start);
        for &s in scalars {
            h.push(dvector![s]);
        }
        h
    }

    #[test]
    fn first_order_stacking() {
        // n_y = n_u = 1, y(t) = 3, u(t) = -1 -> [3, -1].
        let y = hist(0, &[3.0]);
        let u = hist(0, &[-1.0]);
        let phi = assemble_regressor(&y, &u, 0, 1, 1).unwrap();
        assert_eq!(phi.flatten(), dvector![3.0, -1.0]);
    }

    #[test]
    fn ordering_is_most_recent_first() {
        // y = (..., 1, 2), u = (..., 5) at t: [2, 1, 5].
        let y = hist(0, &[1.0, 2.0]);
        let u = hist(0, &[0.0, 5.0]);
        let phi = assemble_regressor(&y, &u, 1, 2, 1).unwrap();
        assert_eq!(phi.flatten(), dvector![2.0, 1.0, 5.0]);
    }

    #[test]
    fn short_history_is_an_error() {
        let y = hist(0, &[1.0]);
        let u = hist(0, &[0.0]);
        let err = assemble_regressor(&y, &u, 0, 2, 1);
        assert!(matches!(err, Err(CoreError::InsufficientHistory { .. })));
    }

    #[test]
    fn advance_and_complete_round_trip() {
        let phi = Regressor::new(
            vec![dvector![2.0], dvector![1.0]],
            vec![dvector![5.0], dvector![4.0]],
        )
        .unwrap();
        let pre = phi.advance(dvector![3.0]);
        assert_eq!(pre.y_now(), &dvector![3.0]);
        assert_eq!(pre.u_past, vec![dvector![5.0]]);
        let next = pre.complete(dvector![6.0]).unwrap();
        assert_eq!(next.flatten(), dvector![3.0, 2.0, 6.0, 5.0]);
    }

    #[test]
    fn flat_round_trip() {
        let phi = Regressor::new(
            vec![dvector![1.0, 2.0], dvector![3.0, 4.0]],
            vec![dvector![5.0]],
        )
        .unwrap();
        let flat = phi.flatten();
        let back = Regressor::from_flat(&flat, 2, 1, 2, 1).unwrap();
        assert_eq!(back, phi);
    }
}
