use super::DenseMatrix;

const MAX_TAYLOR_TERMS: usize = 40;

/// Matrix exponential by scaling and squaring around a truncated Taylor
/// series. The scaled matrix has one-norm at most 1/2, where the series is
/// summed until the next term drops below double-precision roundoff.
pub fn mat_exp(m: &DenseMatrix) -> DenseMatrix {
    assert!(m.is_square(), "matrix exponential of a non-square matrix");
    let n = m.rows();
    let norm = m.norm_one();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = m.scale(0.5f64.powi(squarings));

    let mut result = DenseMatrix::identity(n);
    let mut term = DenseMatrix::identity(n);
    for k in 1..=MAX_TAYLOR_TERMS {
        term = term.matmul(&scaled).scale(1.0 / k as f64);
        result = &result + &term;
        if term.max_abs() <= f64::EPSILON * 1e-2 * result.max_abs() {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    result
}
