use num_complex::Complex64;

use super::{eig_small, DenseMatrix};
use crate::error::{Error, Result};

/// Relative magnitude below which leading coefficients are dropped.
const TRIM_TOL: f64 = 1e-14;

/// Drops highest-degree coefficients with `|c| <= rel_tol * max|c|`.
/// Returns `None` when every coefficient is zero.
pub fn trim_polynomial(coeffs: &[f64], rel_tol: f64) -> Option<Vec<f64>> {
    let max = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if max == 0.0 || !max.is_finite() {
        return None;
    }
    let last = coeffs.iter().rposition(|c| c.abs() > rel_tol * max)?;
    Some(coeffs[..=last].to_vec())
}

/// Horner evaluation of an ascending coefficient list at a complex point.
pub fn poly_eval(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Roots of `c[0] + c[1] x + ... + c[d] x^d` from the eigenvalues of the
/// companion matrix.
pub fn poly_roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let c = trim_polynomial(coeffs, TRIM_TOL).ok_or(Error::DegeneratePolynomial)?;
    let degree = c.len() - 1;
    if degree == 0 {
        return Ok(Vec::new());
    }
    let lead = c[degree];
    let mut companion = DenseMatrix::zeros(degree, degree);
    for j in 0..degree {
        companion[(0, j)] = -c[degree - 1 - j] / lead;
    }
    for i in 1..degree {
        companion[(i, i - 1)] = 1.0;
    }
    eig_small(&companion)
}
