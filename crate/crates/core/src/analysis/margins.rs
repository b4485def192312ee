//! Constructive robustness margins.
//!
//! Given a certified nominal pair `(c, λ)`, these routines compute the
//! constants that quantify how much parameter time-variation and unmodelled
//! dynamics the certified loop tolerates:
//!
//! - [`thm1_margins`] — for a target decay rate `λ_1 ∈ (λ, 1)` and jump
//!   budget `c_0 > 0`: the analysis interval length `m` and the admissible
//!   drift rate `ε = c_0/m²`.
//! - [`thm2_margins`] — when no decay rate is prescribed: an `ε` independent
//!   of `c_0`, the contraction ladder `λ_2, λ_3, λ_4`, and the block count
//!   `N̄` restoring contraction for a given `c_0`.
//! - [`thm3_analysis`] — the largest unmodelled-dynamics size `μ̄` keeping
//!   the comparison matrix `A_cl(μ)` inside a target spectral radius, plus a
//!   certified constant `γ_1` with `‖A_cl(μ̄)^k‖ ≤ γ_1 λ_2^k` for all `k`.

use nalgebra::{DMatrix, Matrix2};
use serde::Serialize;

use crate::error::CoreError;
use crate::linalg::induced_norm;
use crate::Result;

/// Outputs of the time-variation margin with a prescribed decay rate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Thm1Margins {
    /// Analysis interval length (smallest admissible positive integer).
    pub m: u64,
    /// Admissible drift rate `ε = c_0/m²`.
    pub epsilon: f64,
    /// Growth constant `γ_3 = 1 + 2c‖f‖‖𝒮‖` of the rough-bound case.
    pub gamma3: f64,
}

/// Outputs of the time-variation margin without a prescribed decay rate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Thm2Margins {
    pub m: u64,
    /// Per-interval contraction `λ_2 = c((λ_1+λ)/2)^m < 1`.
    pub lambda2: f64,
    /// Drift rate: largest bisection value keeping `λ_3 < 1`; independent
    /// of `c_0`.
    pub epsilon: f64,
    /// Drift-inflated contraction `λ_3 < 1`.
    pub lambda3: f64,
    /// Number of length-`m` intervals absorbing the jump budget.
    pub n_bar: u64,
    /// Overall contraction `λ_4 < 1` over `m·N̄` steps.
    pub lambda4: f64,
}

/// Outputs of the unmodelled-dynamics margin.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Thm3Margins {
    /// Largest `μ` with `ρ(A_cl(μ)) ≤ λ_2(1 − 1e−9)`.
    pub mu_bar: f64,
    /// Certified constant with `‖A_cl(μ̄)^k‖ ≤ γ_1 λ_2^k` for all `k ≥ 0`.
    pub gamma1: f64,
    /// Certified bound on the ratio beyond the explicitly powered range.
    pub tail_bound: f64,
    /// Number of explicit powers taken.
    pub powers_used: usize,
}

/// The comparison matrix of the unmodelled-dynamics loop,
/// `A_cl(μ) = [[λ_1 + c_1‖g‖μ, c_1μ], [β‖g‖, β]]`.
pub fn a_cl(mu: f64, c1: f64, lambda1: f64, beta: f64, g_gain: f64) -> Matrix2<f64> {
    Matrix2::new(lambda1 + c1 * g_gain * mu, c1 * mu, beta * g_gain, beta)
}

/// Spectral radius of a 2×2 matrix with real spectrum (nonnegative
/// off-diagonal product); used for the comparison matrices here.
pub fn spectral_radius_2x2(m: &Matrix2<f64>) -> f64 {
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let tr = a + d;
    let disc = (a - d) * (a - d) + 4.0 * b * c;
    if disc >= 0.0 {
        let root = disc.sqrt();
        (0.5 * (tr + root)).abs().max((0.5 * (tr - root)).abs())
    } else {
        // Complex pair: |λ| = sqrt(det).
        (a * d - b * c).abs().sqrt()
    }
}

fn gamma3_of(c: f64, f_gain: f64, s_norm: f64) -> f64 {
    1.0 + 2.0 * c * f_gain * s_norm
}

fn check_common(c: f64, lambda: f64, lambda1: f64, f_gain: f64, s_norm: f64) -> Result<()> {
    if !(c >= 1.0) || !c.is_finite() {
        return Err(CoreError::param(format!("gain must be finite and >= 1, got {c}")));
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(CoreError::param(format!("lambda must lie in (0,1), got {lambda}")));
    }
    if !(lambda1 > lambda && lambda1 < 1.0) {
        return Err(CoreError::param(format!(
            "lambda1 must lie in (lambda, 1) = ({lambda}, 1), got {lambda1}"
        )));
    }
    if !(f_gain > 0.0) {
        return Err(CoreError::param(format!("f gain must be positive, got {f_gain}")));
    }
    if !(s_norm >= 0.0) {
        return Err(CoreError::param(format!("parameter-set norm must be >= 0, got {s_norm}")));
    }
    Ok(())
}

/// Margin for tolerating time-variation at a prescribed decay rate `λ_1`.
///
/// `m` is the smallest positive integer with
///
/// ```text
/// m ≥ [ln c + (4c_0c‖f‖/(λ_1−λ)) (ln γ_3 + ln 2 − ln(λ+λ_1))]
///     / [ln(2λ_1) − ln(λ+λ_1)]
/// ```
///
/// and the admissible drift rate is `ε = c_0/m²` exactly.
pub fn thm1_margins(
    c: f64,
    lambda: f64,
    lambda1: f64,
    c0: f64,
    f_gain: f64,
    s_norm: f64,
) -> Result<Thm1Margins> {
    check_common(c, lambda, lambda1, f_gain, s_norm)?;
    if !(c0 > 0.0) {
        return Err(CoreError::param(format!("jump budget c0 must be positive, got {c0}")));
    }
    let gamma3 = gamma3_of(c, f_gain, s_norm);
    let numerator = c.ln()
        + (4.0 * c0 * c * f_gain / (lambda1 - lambda))
            * (gamma3.ln() + 2.0f64.ln() - (lambda + lambda1).ln());
    let denominator = (2.0 * lambda1).ln() - (lambda + lambda1).ln();
    let bound = numerator / denominator;
    let m = if bound <= 1.0 { 1 } else { bound.ceil() as u64 };
    let epsilon = c0 / (m as f64 * m as f64);
    Ok(Thm1Margins { m, epsilon, gamma3 })
}

/// Margin for tolerating time-variation with a free decay rate; here `ε`
/// does not depend on the jump budget `c_0 ≥ 0`.
pub fn thm2_margins(
    c: f64,
    lambda: f64,
    lambda1: f64,
    c0: f64,
    f_gain: f64,
    s_norm: f64,
) -> Result<Thm2Margins> {
    check_common(c, lambda, lambda1, f_gain, s_norm)?;
    if !(c0 >= 0.0) {
        return Err(CoreError::param(format!("jump budget c0 must be >= 0, got {c0}")));
    }
    let gamma3 = gamma3_of(c, f_gain, s_norm);
    let rho = 0.5 * (lambda1 + lambda);
    let log_k = (2.0 * gamma3 / (lambda1 + lambda)).ln(); // ln of the drift inflation base

    // Smallest integer strictly above ln(c)/(ln 2 − ln(λ_1+λ)).
    let m_bound = c.ln() / (2.0f64.ln() - (lambda1 + lambda).ln());
    let mut m = if m_bound < 0.0 { 1 } else { (m_bound.floor() as u64) + 1 };

    const EPS_TARGET: f64 = 1.0 - 1e-6;
    const EPS_LO_LOG: f64 = -700.0; // ~1e-304 in natural log
    const EPS_HI_LOG: f64 = 5.0;

    // λ_2 must clear the λ_3 target with room for a positive ε; if the
    // minimal m leaves none, enlarge m (each increment contracts λ_2 by ρ).
    let mut lambda2 = c * rho.powi(m as i32);
    let mut guard = 0;
    while lambda2 >= EPS_TARGET && guard < 10_000 {
        m += 1;
        lambda2 = c * rho.powi(m as i32);
        guard += 1;
    }
    if lambda2 >= 1.0 {
        return Err(CoreError::Internal {
            message: format!("per-interval contraction failed: lambda2 = {lambda2}"),
        });
    }

    let q = (2.0 * c * f_gain / (lambda1 - lambda)) * (m as f64) * (m as f64);
    let lambda3_of = |eps: f64| (q * eps * log_k).exp() * lambda2;

    // Largest ε with λ_3(ε) ≤ 1 − 1e−6, by bisection on ln ε.
    let mut lo = EPS_LO_LOG;
    let mut hi = EPS_HI_LOG;
    if lambda3_of(lo.exp()) > EPS_TARGET {
        return Err(CoreError::Internal {
            message: "no positive drift rate satisfies the contraction target".into(),
        });
    }
    if lambda3_of(hi.exp()) <= EPS_TARGET {
        lo = hi; // even the largest probe is feasible
    } else {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if lambda3_of(mid.exp()) <= EPS_TARGET {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    let epsilon = lo.exp();
    let lambda3 = lambda3_of(epsilon);
    if !(lambda3 < 1.0) {
        return Err(CoreError::Internal { message: format!("lambda3 = {lambda3} not < 1") });
    }

    // Smallest integer strictly above the jump-absorption block count.
    let n_bound = (2.0 * c * c0 * (m as f64) * f_gain * ((2.0 * gamma3).ln() - (lambda1 + lambda).ln()))
        / ((lambda - lambda1) * lambda3.ln());
    let n_bar = if n_bound < 0.0 { 1 } else { (n_bound.floor() as u64) + 1 };

    // λ_4 in log space: the jump inflation alone can overflow while the
    // product with λ_3^N̄ stays just under one.
    let log_lambda4 = (2.0 * c * f_gain / (lambda1 - lambda)) * c0 * (m as f64) * log_k
        + (n_bar as f64) * lambda3.ln();
    let lambda4 = log_lambda4.exp();
    if !(lambda4 < 1.0) {
        return Err(CoreError::Internal { message: format!("lambda4 = {lambda4} not < 1") });
    }

    Ok(Thm2Margins { m, lambda2, epsilon, lambda3, n_bar, lambda4 })
}

/// Margin for tolerating unmodelled dynamics.
///
/// `μ̄` is found by bisection (60 iterations) as the largest `μ` with
/// `ρ(A_cl(μ)) ≤ λ_2(1 − 1e−9)`; `γ_1` comes from explicit powering of
/// `A_cl(μ̄)/λ_2` with a certified spectral tail bound.
pub fn thm3_analysis(
    c1: f64,
    lambda1: f64,
    beta: f64,
    g_gain: f64,
    lambda2: f64,
) -> Result<Thm3Margins> {
    if !(c1 >= 1.0) || !c1.is_finite() {
        return Err(CoreError::param(format!("gain c1 must be finite and >= 1, got {c1}")));
    }
    if !(lambda1 > 0.0 && lambda1 < 1.0) {
        return Err(CoreError::param(format!("lambda1 must lie in (0,1), got {lambda1}")));
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(CoreError::param(format!("beta must lie in (0,1), got {beta}")));
    }
    if !(g_gain >= 0.0) {
        return Err(CoreError::param(format!("g gain must be >= 0, got {g_gain}")));
    }
    let floor = lambda1.max(beta);
    if !(lambda2 > floor && lambda2 < 1.0) {
        return Err(CoreError::param(format!(
            "lambda2 must lie in (max(lambda1, beta), 1) = ({floor}, 1), got {lambda2}"
        )));
    }

    let target = lambda2 * (1.0 - 1e-9);
    let feasible = |mu: f64| spectral_radius_2x2(&a_cl(mu, c1, lambda1, beta, g_gain)) <= target;
    if !feasible(0.0) {
        return Err(CoreError::param(
            "lambda2 is too close to max(lambda1, beta): even mu = 0 misses the target radius",
        ));
    }

    // Bracket, then 60 bisection iterations.
    let mut hi = 1.0;
    let mut doubling = 0;
    while feasible(hi) {
        hi *= 2.0;
        doubling += 1;
        if doubling > 200 {
            return Err(CoreError::Internal {
                message: "spectral radius failed to grow with mu".into(),
            });
        }
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mu_bar = lo;

    let (gamma1, tail_bound, powers_used) =
        certified_power_ratio(&a_cl(mu_bar, c1, lambda1, beta, g_gain), lambda2);
    Ok(Thm3Margins { mu_bar, gamma1, tail_bound, powers_used })
}

/// Certified `γ_1 = sup_k ‖A^k‖/λ_2^k` for a 2×2 matrix with
/// `ρ(A) < λ_2`: explicit powers of the scaled matrix `B = A/λ_2` up to a
/// cap, then a spectral-decomposition bound on the remaining tail.
fn certified_power_ratio(a: &Matrix2<f64>, lambda2: f64) -> (f64, f64, usize) {
    let b = a / lambda2;
    const K_CAP: usize = 65_536;

    let mut power = Matrix2::identity();
    let mut running_max = 1.0f64; // k = 0 ratio
    let mut k = 0;
    while k < K_CAP {
        power *= b;
        k += 1;
        let ratio = norm_2x2(&power);
        running_max = running_max.max(ratio);
        if ratio <= f64::EPSILON * running_max {
            break;
        }
    }

    // Tail: ‖B^j‖ for j > k via the spectral decomposition of B.
    let (ba, bb, bc, bd) = (b[(0, 0)], b[(0, 1)], b[(1, 0)], b[(1, 1)]);
    let tr = ba + bd;
    let disc = (ba - bd) * (ba - bd) + 4.0 * bb * bc;
    let rho = spectral_radius_2x2(&b);
    let tail = if disc.sqrt() > 1e-10 * rho.max(1e-300) && disc > 0.0 {
        // Distinct real eigenvalues: B^j = x_a^j P_a + x_b^j P_b.
        let root = disc.sqrt();
        let xa = 0.5 * (tr + root);
        let xb = 0.5 * (tr - root);
        let identity = Matrix2::identity();
        let pa = (b - identity * xb) / (xa - xb);
        let pb = identity - pa;
        (norm_2x2(&pa) + norm_2x2(&pb)) * rho.powi(k as i32)
    } else {
        // Defective or near-defective: B = xI + N with N² = 0 (Cayley-
        // Hamilton at a double root), so ‖B^j‖ ≤ |x|^j + j|x|^{j−1}‖N‖.
        let x = 0.5 * tr;
        let n = b - Matrix2::identity() * x;
        let n_norm = norm_2x2(&n);
        let xa = x.abs();
        if xa == 0.0 {
            // Nilpotent: B² = 0, tail beyond k ≥ 2 is zero.
            if k >= 2 {
                0.0
            } else {
                n_norm
            }
        } else {
            // sup_{s ≥ k} (x^s + s x^{s−1} n): the second term peaks at
            // s* = −1/ln x; evaluate at max(k, s*).
            let s_star = -1.0 / xa.ln();
            let s = (k as f64).max(s_star);
            xa.powi(k as i32) + s * xa.powf(s - 1.0) * n_norm
        }
    };

    (running_max.max(tail), tail, k)
}

fn norm_2x2(m: &Matrix2<f64>) -> f64 {
    induced_norm(&DMatrix::from_row_slice(2, 2, &[m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]]))
}

/// Inputs of a margin report, serialized alongside the outputs.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MarginInputs {
    pub c: f64,
    pub lambda: f64,
    pub lambda1: f64,
    pub c0: f64,
    pub f_gain: f64,
    pub s_norm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_gain: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda2: Option<f64>,
}

/// Margin outputs for all applicable theorems, JSON-exportable.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MarginReport {
    pub inputs: MarginInputs,
    pub thm1: Thm1Margins,
    pub thm2: Thm2Margins,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thm3: Option<Thm3Margins>,
}

impl MarginReport {
    /// Compute the margins for the given inputs; the unmodelled-dynamics part
    /// runs when `(c1, beta, g_gain, lambda2)` are all present.
    pub fn compute(inputs: MarginInputs) -> Result<Self> {
        let thm1 =
            thm1_margins(inputs.c, inputs.lambda, inputs.lambda1, inputs.c0, inputs.f_gain, inputs.s_norm)?;
        let thm2 =
            thm2_margins(inputs.c, inputs.lambda, inputs.lambda1, inputs.c0, inputs.f_gain, inputs.s_norm)?;
        let thm3 = match (inputs.c1, inputs.beta, inputs.g_gain, inputs.lambda2) {
            (Some(c1), Some(beta), Some(g_gain), Some(lambda2)) => {
                Some(thm3_analysis(c1, inputs.lambda1, beta, g_gain, lambda2)?)
            }
            _ => None,
        };
        Ok(MarginReport { inputs, thm1, thm2, thm3 })
    }
}
