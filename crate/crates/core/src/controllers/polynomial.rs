//! Polynomials in the delay operator `z^{-1}`.
//!
//! Coefficients are stored in ascending powers of `z^{-1}`: `coeffs[k]`
//! multiplies `z^{-k}`. The pole-placement conventions are baked into the
//! constructors: the plant denominator `Â` is monic with negated
//! `a`-coefficients, the numerator `B̂` and controller numerator `P̂` have
//! zero constant term, and the controller denominator `L̂` is monic.

use nalgebra::DVector;

/// Dense polynomial in `z^{-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    pub coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Polynomial { coeffs }
    }

    pub fn one() -> Self {
        Polynomial { coeffs: vec![1.0] }
    }

    /// `Â(z^{-1}) = 1 − a_1 z^{-1} − … − a_n z^{-n}`.
    pub fn plant_denominator(a: &[f64]) -> Self {
        let mut coeffs = Vec::with_capacity(a.len() + 1);
        coeffs.push(1.0);
        coeffs.extend(a.iter().map(|&ai| -ai));
        Polynomial { coeffs }
    }

    /// `B̂(z^{-1}) = b_1 z^{-1} + … + b_n z^{-n}`.
    pub fn plant_numerator(b: &[f64]) -> Self {
        let mut coeffs = Vec::with_capacity(b.len() + 1);
        coeffs.push(0.0);
        coeffs.extend_from_slice(b);
        Polynomial { coeffs }
    }

    /// `L̂(z^{-1}) = 1 + l_1 z^{-1} + … + l_n z^{-n}`.
    pub fn controller_denominator(l: &[f64]) -> Self {
        let mut coeffs = Vec::with_capacity(l.len() + 1);
        coeffs.push(1.0);
        coeffs.extend_from_slice(l);
        Polynomial { coeffs }
    }

    /// `P̂(z^{-1}) = p_1 z^{-1} + … + p_n z^{-n}`.
    pub fn controller_numerator(p: &[f64]) -> Self {
        let mut coeffs = Vec::with_capacity(p.len() + 1);
        coeffs.push(0.0);
        coeffs.extend_from_slice(p);
        Polynomial { coeffs }
    }

    /// Split a stacked parameter vector `[a_1..a_n, b_1..b_n]` into the
    /// associated plant polynomials.
    pub fn plant_pair_from_theta(theta: &DVector<f64>) -> (Polynomial, Polynomial) {
        let n = theta.len() / 2;
        let a: Vec<f64> = theta.as_slice()[..n].to_vec();
        let b: Vec<f64> = theta.as_slice()[n..].to_vec();
        (Polynomial::plant_denominator(&a), Polynomial::plant_numerator(&b))
    }

    /// Degree as stored (trailing zeros included).
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Polynomial::new(vec![]);
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0.0; len];
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = self.coeff(k) + other.coeff(k);
        }
        Polynomial::new(out)
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0.0; len];
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = self.coeff(k) - other.coeff(k);
        }
        Polynomial::new(out)
    }

    /// Largest absolute coefficient.
    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |acc, &c| acc.max(c.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conventions() {
        let a_hat = Polynomial::plant_denominator(&[0.5, -0.2]);
        assert_eq!(a_hat.coeffs, vec![1.0, -0.5, 0.2]);
        let b_hat = Polynomial::plant_numerator(&[1.0, 0.3]);
        assert_eq!(b_hat.coeffs, vec![0.0, 1.0, 0.3]);
        let l_hat = Polynomial::controller_denominator(&[0.5]);
        assert_eq!(l_hat.coeffs, vec![1.0, 0.5]);
        let p_hat = Polynomial::controller_numerator(&[0.25]);
        assert_eq!(p_hat.coeffs, vec![0.0, 0.25]);
    }

    #[test]
    fn multiplication() {
        // (1 - 0.5 z^-1)(1 + 0.5 z^-1) = 1 - 0.25 z^-2.
        let a = Polynomial::new(vec![1.0, -0.5]);
        let b = Polynomial::new(vec![1.0, 0.5]);
        let prod = a.mul(&b);
        assert_eq!(prod.coeffs, vec![1.0, 0.0, -0.25]);
    }

    #[test]
    fn subtraction_pads() {
        let a = Polynomial::new(vec![1.0]);
        let b = Polynomial::new(vec![1.0, 0.0, 0.25]);
        assert_eq!(a.sub(&b).coeffs, vec![0.0, 0.0, -0.25]);
    }
}
