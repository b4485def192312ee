//! Pole placement at the origin via the polynomial Diophantine equation.
//!
//! Given the degree-`n` plant polynomials `Â` (monic) and `B̂` (strictly
//! delayed), find `L̂` (monic, degree `n`) and `P̂` (strictly delayed,
//! degree `n`) with
//!
//! ```text
//! Â L̂ + B̂ P̂ = 1,
//! ```
//!
//! which puts every closed-loop pole at zero. Matching the coefficients of
//! `z^{-1} … z^{-2n}` gives a `2n × 2n` Sylvester-structured linear system in
//! the unknown `l` and `p` coefficients (the `z^0` coefficient is `1`
//! automatically). Solvability is exactly coprimeness of `Â` and `B̂`; a
//! near-common factor shows up as ill conditioning and is reported instead of
//! silently amplifying noise.

use nalgebra::{DMatrix, DVector};

use crate::controllers::Polynomial;
use crate::error::CoreError;
use crate::linalg::condition_2;
use crate::Result;

/// Condition-number limit beyond which the system counts as near-singular.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Residual limit on the recomposed product `ÂL̂ + B̂P̂ − 1`.
const RESIDUAL_LIMIT: f64 = 1e-9;

/// Solution of the pole-placement Diophantine equation.
#[derive(Debug, Clone)]
pub struct DiophantineSolution {
    pub l_hat: Polynomial,
    pub p_hat: Polynomial,
    /// 2-norm condition estimate of the Sylvester system.
    pub condition: f64,
    /// Max absolute coefficient of `ÂL̂ + B̂P̂ − 1`.
    pub residual: f64,
}

impl DiophantineSolution {
    /// `l_1 … l_n` without the monic head.
    pub fn l_coeffs(&self) -> &[f64] {
        &self.l_hat.coeffs[1..]
    }

    /// `p_1 … p_n` without the zero head.
    pub fn p_coeffs(&self) -> &[f64] {
        &self.p_hat.coeffs[1..]
    }

    /// Feedback gain row `K̂ = [−p_1 … −p_n, −l_1 … −l_n]` applied to
    /// `φ = [y-window; u-window]`.
    pub fn gain_row(&self) -> DVector<f64> {
        let n = self.p_coeffs().len();
        let mut k = DVector::zeros(2 * n);
        for (i, &p) in self.p_coeffs().iter().enumerate() {
            k[i] = -p;
        }
        for (i, &l) in self.l_coeffs().iter().enumerate() {
            k[n + i] = -l;
        }
        k
    }
}

/// The `2n × 2n` Sylvester matrix of the coefficient-matching system.
///
/// Row `k` (for `k = 1..2n`) matches the `z^{-k}` coefficient; columns
/// `1..n` carry the `l_j` unknowns against `Â`'s coefficients, columns
/// `n+1..2n` the `p_j` unknowns against `B̂`'s.
pub fn sylvester_matrix(a_hat: &Polynomial, b_hat: &Polynomial, n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for k in 1..=2 * n {
        for j in 1..=n {
            // Â_{k−j} multiplies l_j.
            if k >= j && k - j <= n {
                m[(k - 1, j - 1)] = a_hat.coeff(k - j);
            }
            // B̂_{k−j} multiplies p_j (B̂_0 = 0 so only k−j ≥ 1 contributes).
            if k > j && k - j <= n {
                m[(k - 1, n + j - 1)] = b_hat.coeff(k - j);
            }
        }
    }
    m
}

/// Solve `ÂL̂ + B̂P̂ = 1` for degree-`n` polynomials.
pub fn pp_solve_diophantine(a_hat: &Polynomial, b_hat: &Polynomial) -> Result<DiophantineSolution> {
    let n = a_hat.degree();
    if n == 0 {
        return Err(CoreError::param("plant polynomials must have degree at least 1"));
    }
    if b_hat.degree() != n {
        return Err(CoreError::dim(format!(
            "degree mismatch: A has degree {n}, B has degree {}",
            b_hat.degree()
        )));
    }
    if (a_hat.coeff(0) - 1.0).abs() > 1e-12 || b_hat.coeff(0).abs() > 1e-12 {
        return Err(CoreError::param("A must be monic and B strictly delayed"));
    }

    let m = sylvester_matrix(a_hat, b_hat, n);
    let condition = condition_2(&m);
    if !condition.is_finite() || condition > CONDITION_LIMIT {
        return Err(CoreError::NearSingular { condition });
    }

    // Right side: move Â's own coefficients (times L̂'s monic head) across.
    let mut rhs = DVector::zeros(2 * n);
    for k in 1..=n {
        rhs[k - 1] = -a_hat.coeff(k);
    }

    let solution = m
        .clone()
        .lu()
        .solve(&rhs)
        .ok_or(CoreError::NearSingular { condition })?;

    let l: Vec<f64> = solution.as_slice()[..n].to_vec();
    let p: Vec<f64> = solution.as_slice()[n..].to_vec();
    let l_hat = Polynomial::controller_denominator(&l);
    let p_hat = Polynomial::controller_numerator(&p);

    let product = a_hat.mul(&l_hat).add(&b_hat.mul(&p_hat));
    let residual = product.sub(&Polynomial::one()).max_abs_coeff();
    if residual > RESIDUAL_LIMIT {
        return Err(CoreError::NearSingular { condition });
    }

    Ok(DiophantineSolution { l_hat, p_hat, condition, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn first_order_worked_example() {
        // Â = 1 − 0.5 z^{-1}, B̂ = z^{-1}: L̂ = 1 + 0.5 z^{-1}, P̂ = 0.25 z^{-1}.
        let a_hat = Polynomial::plant_denominator(&[0.5]);
        let b_hat = Polynomial::plant_numerator(&[1.0]);
        let sol = pp_solve_diophantine(&a_hat, &b_hat).unwrap();
        assert!((sol.l_coeffs()[0] - 0.5).abs() < 1e-12);
        assert!((sol.p_coeffs()[0] - 0.25).abs() < 1e-12);

        // Verify by multiplication.
        let total = a_hat.mul(&sol.l_hat).add(&b_hat.mul(&sol.p_hat)).sub(&Polynomial::one());
        assert!(total.max_abs_coeff() < 1e-12);
    }

    #[test]
    fn already_deadbeat_plant_needs_no_feedback() {
        // Â = 1 (a = 0), B̂ = z^{-1}: L̂ = 1, P̂ = 0.
        let a_hat = Polynomial::plant_denominator(&[0.0]);
        let b_hat = Polynomial::plant_numerator(&[1.0]);
        let sol = pp_solve_diophantine(&a_hat, &b_hat).unwrap();
        assert!(sol.l_coeffs()[0].abs() < 1e-14);
        assert!(sol.p_coeffs()[0].abs() < 1e-14);
    }

    #[test]
    fn common_factor_is_near_singular() {
        // Â = (1 − 0.5z^{-1})(1 − 0.3z^{-1}), B̂ = z^{-1}(1 − 0.5z^{-1}):
        // the shared root 0.5 makes the 4×4 Sylvester system singular.
        let a_hat =
            Polynomial::new(vec![1.0, -0.5]).mul(&Polynomial::new(vec![1.0, -0.3]));
        let b_hat = Polynomial::new(vec![0.0, 1.0, -0.5]);
        assert_eq!(a_hat.degree(), 2);
        assert_eq!(b_hat.degree(), 2);
        let res = pp_solve_diophantine(&a_hat, &b_hat);
        assert!(matches!(res, Err(CoreError::NearSingular { .. })), "got {res:?}");

        let m = sylvester_matrix(&a_hat, &b_hat, 2);
        assert!(condition_2(&m) > CONDITION_LIMIT);
    }

    #[test]
    fn random_well_conditioned_pairs_have_tiny_residual() {
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        let mut produced = 0;
        while produced < 100 {
            let n = rng.random_range(1..=3usize);
            let a: Vec<f64> = (0..n).map(|_| rng.random_range(-0.9..0.9)).collect();
            let mut b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            if b[0].abs() < 0.3 {
                b[0] = 0.5 + b[0].abs();
            }
            let a_hat = Polynomial::plant_denominator(&a);
            let b_hat = Polynomial::plant_numerator(&b);
            match pp_solve_diophantine(&a_hat, &b_hat) {
                Ok(sol) => {
                    assert!(sol.residual <= 1e-9, "residual {}", sol.residual);
                    produced += 1;
                }
                Err(CoreError::NearSingular { .. }) => {} // discard ill-conditioned draw
                Err(e) => panic!("unexpected error {e}"),
            }
        }
    }

    #[test]
    fn gain_row_layout() {
        let sol = DiophantineSolution {
            l_hat: Polynomial::controller_denominator(&[0.5, -0.1]),
            p_hat: Polynomial::controller_numerator(&[0.25, 0.7]),
            condition: 1.0,
            residual: 0.0,
        };
        let k = sol.gain_row();
        assert_eq!(k.as_slice(), &[-0.25, -0.7, -0.5, 0.1]);
    }
}
