//! Differentiation weights on equidistant nodes.
//!
//! For a degree-`m` interpolant through nodes `0, 1, ..., m` (in units of the
//! step), the derivative at node `s` is `(1/step) * Σ_l H(m, s, l) u_l` with
//!
//! ```text
//! H(m, s, l) = (-1)^(m+l) * C(m, l) / m! * d/dσ [ Π_{ν≠l} (σ - ν) ] at σ = s.
//! ```
//!
//! The product has integer coefficients and is evaluated at an integer, so
//! each weight is an exact rational that is rounded to `f64` once.

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Highest supported interpolation degree.
pub const MAX_DEGREE: usize = 10;

/// Weights for one degree `m`.
///
/// * `full_weights` is `m × (m+1)`, entry `(s-1, l)` = `H(m, s, l)`.
/// * `gamma0[s-1]` = `H(m, s, 0)`, the coefficient of the known node.
/// * `gamma` is `m × m`, entry `(s-1, l-1)` = `H(m, s, l)` for `l ≥ 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct StencilTable {
    m: usize,
    full_weights: DenseMatrix,
    gamma0: Vec<f64>,
    gamma: DenseMatrix,
}

impl StencilTable {
    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn full_weights(&self) -> &DenseMatrix {
        &self.full_weights
    }

    pub fn gamma0(&self) -> &[f64] {
        &self.gamma0
    }

    pub fn gamma(&self) -> &DenseMatrix {
        &self.gamma
    }

    /// `H(m, s, l)` for `s ∈ 1..=m`, `l ∈ 0..=m`.
    pub fn weight(&self, s: usize, l: usize) -> f64 {
        self.full_weights[(s - 1, l)]
    }

    /// Assembles a table from an explicit weight matrix without checking the
    /// exactness properties. Intended for fault-injection tests.
    pub fn from_full_weights(full_weights: DenseMatrix) -> Result<Self> {
        let m = full_weights.rows();
        if m == 0 || full_weights.cols() != m + 1 {
            return Err(Error::InvalidArgument(format!(
                "weight matrix must be m x (m+1), got {}x{}",
                full_weights.rows(),
                full_weights.cols()
            )));
        }
        let gamma0 = (0..m).map(|s| full_weights[(s, 0)]).collect();
        let gamma = DenseMatrix::from_fn(m, m, |s, l| full_weights[(s, l + 1)]);
        Ok(StencilTable { m, full_weights, gamma0, gamma })
    }
}

fn check_degree(m: usize) -> Result<()> {
    if m == 0 || m > MAX_DEGREE {
        return Err(Error::InvalidArgument(format!("degree {m} outside supported range 1..={MAX_DEGREE}")));
    }
    Ok(())
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Exact rational `(numerator, denominator)` of `H(m, s, l)`.
fn stencil_weight_exact(m: usize, s: usize, l: usize) -> (i128, i128) {
    // Ascending integer coefficients of Π_{ν≠l} (σ - ν).
    let mut poly: Vec<i128> = vec![1];
    for nu in (0..=m).filter(|&nu| nu != l) {
        let mut next = vec![0i128; poly.len() + 1];
        for (k, &c) in poly.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * nu as i128;
        }
        poly = next;
    }
    let s = s as i128;
    let derivative: i128 = poly.iter().enumerate().skip(1).map(|(k, &c)| k as i128 * c * s.pow(k as u32 - 1)).sum();
    let binom = (1..=l as i128).fold(1i128, |b, k| b * (m as i128 - k + 1) / k);
    let factorial = (1..=m as i128).product::<i128>();
    let sign = if (m + l).is_multiple_of(2) { 1 } else { -1 };
    let num = sign * binom * derivative;
    let g = gcd(num, factorial).max(1);
    (num / g, factorial / g)
}

/// The weight `H(m, s, l)`.
pub fn stencil_weight(m: usize, s: usize, l: usize) -> Result<f64> {
    check_degree(m)?;
    if s == 0 || s > m {
        return Err(Error::InvalidArgument(format!("evaluation node {s} outside 1..={m}")));
    }
    if l > m {
        return Err(Error::InvalidArgument(format!("source node {l} outside 0..={m}")));
    }
    let (num, den) = stencil_weight_exact(m, s, l);
    Ok(num as f64 / den as f64)
}

pub fn build_stencil(m: usize) -> Result<StencilTable> {
    check_degree(m)?;
    let mut full = DenseMatrix::zeros(m, m + 1);
    for s in 1..=m {
        for l in 0..=m {
            full[(s - 1, l)] = stencil_weight(m, s, l)?;
        }
    }
    StencilTable::from_full_weights(full)
}

/// Derivative weights at node `s` from the barycentric form of the
/// Lagrange interpolant, in floating point:
/// `D_{s,l} = (w_l / w_s) / (s − l)` for `l ≠ s`, `D_{s,s} = −Σ_{l≠s} D_{s,l}`,
/// with `w_j = 1 / ∏_{k≠j} (j − k)`.
///
/// This route shares no code with [`stencil_weight`] and serves as its
/// cross-check.
pub fn lagrange_derivative_oracle(m: usize, s: usize) -> Result<Vec<f64>> {
    check_degree(m)?;
    if s == 0 || s > m {
        return Err(Error::InvalidArgument(format!("evaluation node {s} outside 1..={m}")));
    }
    let w: Vec<f64> = (0..=m)
        .map(|j| {
            let p: f64 = (0..=m).filter(|&k| k != j).map(|k| j as f64 - k as f64).product();
            1.0 / p
        })
        .collect();
    let mut row: Vec<f64> = (0..=m).map(|l| if l == s { 0.0 } else { (w[l] / w[s]) / (s as f64 - l as f64) }).collect();
    row[s] = -row.iter().sum::<f64>();
    Ok(row)
}
