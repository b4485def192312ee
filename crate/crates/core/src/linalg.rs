//! Small dense linear-algebra helpers used across the crate.

use nalgebra::{DMatrix, DVector};

/// Induced 2-norm (largest singular value) of a dense matrix.
///
/// Column and row vectors short-circuit to the Euclidean norm, which is the
/// common case for the scalar-output plants.
pub fn induced_norm(m: &DMatrix<f64>) -> f64 {
    if m.ncols() == 0 || m.nrows() == 0 {
        return 0.0;
    }
    if m.ncols() == 1 || m.nrows() == 1 {
        return m.norm();
    }
    m.singular_values().iter().fold(0.0f64, |acc, &s| acc.max(s))
}

/// 2-norm condition number estimate via singular values.
///
/// Returns `f64::INFINITY` when the smallest singular value underflows.
pub fn condition_2(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    let mut smax = 0.0f64;
    let mut smin = f64::INFINITY;
    for &s in sv.iter() {
        smax = smax.max(s);
        smin = smin.min(s);
    }
    if smin <= 0.0 || !smin.is_finite() {
        return f64::INFINITY;
    }
    smax / smin
}

/// Flatten a matrix into a vector in row-major order.
pub fn flatten_row_major(m: &DMatrix<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(m.nrows() * m.ncols());
    let mut k = 0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out[k] = m[(i, j)];
            k += 1;
        }
    }
    out
}

/// Rebuild a matrix from its row-major flattening.
pub fn unflatten_row_major(v: &DVector<f64>, rows: usize, cols: usize) -> DMatrix<f64> {
    assert_eq!(v.len(), rows * cols, "flattened length mismatch");
    DMatrix::from_row_slice(rows, cols, v.as_slice())
}
