use super::DenseMatrix;
use crate::error::{Error, Result};

/// Pivots smaller than this fraction of the largest input entry count as zero.
const SINGULAR_PIVOT_RATIO: f64 = 1e-12;

/// LU factorization with partial (row) pivoting, `P·M = L·U`.
#[derive(Clone, Debug)]
pub struct LuDecomposition {
    lu: DenseMatrix,
    perm: Vec<usize>,
    sign: f64,
}

impl LuDecomposition {
    pub fn new(m: &DenseMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidArgument(format!("LU needs a square matrix, got {}x{}", m.rows(), m.cols())));
        }
        let threshold = SINGULAR_PIVOT_RATIO * m.max_abs();
        let (lu, perm, sign) =
            eliminate(m, |k, pivot| if pivot.abs() <= threshold { Err(Error::Singular { pivot: k }) } else { Ok(()) })?;
        Ok(LuDecomposition { lu, perm, sign })
    }

    pub fn order(&self) -> usize {
        self.lu.rows()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.order();
        assert_eq!(b.len(), n, "rhs length does not match matrix order");
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let s: f64 = row[..i].iter().zip(&x[..i]).map(|(l, v)| l * v).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s: f64 = row[i + 1..].iter().zip(&x[i + 1..]).map(|(u, v)| u * v).sum();
            x[i] = (x[i] - s) / row[i];
        }
        x
    }

    pub fn solve_matrix(&self, b: &DenseMatrix) -> DenseMatrix {
        assert_eq!(b.rows(), self.order());
        let mut out = DenseMatrix::zeros(b.rows(), b.cols());
        let mut col = vec![0.0; b.rows()];
        for j in 0..b.cols() {
            for (i, c) in col.iter_mut().enumerate() {
                *c = b[(i, j)];
            }
            for (i, v) in self.solve(&col).into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        out
    }

    pub fn determinant(&self) -> f64 {
        (0..self.order()).fold(self.sign, |d, i| d * self.lu[(i, i)])
    }
}

/// Gaussian elimination with partial pivoting; `check` may veto a pivot.
fn eliminate(
    m: &DenseMatrix,
    mut check: impl FnMut(usize, f64) -> Result<()>,
) -> Result<(DenseMatrix, Vec<usize>, f64)> {
    let n = m.rows();
    let mut a = m.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;
    for k in 0..n {
        let (p, _) =
            (k..n).map(|i| (i, a[(i, k)].abs())).fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if p != k {
            for j in 0..n {
                let tmp = a[(k, j)];
                a[(k, j)] = a[(p, j)];
                a[(p, j)] = tmp;
            }
            perm.swap(k, p);
            sign = -sign;
        }
        let pivot = a[(k, k)];
        check(k, pivot)?;
        if pivot == 0.0 {
            continue;
        }
        for i in k + 1..n {
            let factor = a[(i, k)] / pivot;
            a[(i, k)] = factor;
            if factor != 0.0 {
                for j in k + 1..n {
                    a[(i, j)] -= factor * a[(k, j)];
                }
            }
        }
    }
    Ok((a, perm, sign))
}

/// Solves `M x = rhs`.
pub fn lu_solve(m: &DenseMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    if rhs.len() != m.rows() {
        return Err(Error::InvalidArgument(format!("rhs has {} rows, matrix has order {}", rhs.len(), m.rows())));
    }
    Ok(LuDecomposition::new(m)?.solve(rhs))
}

pub fn lu_solve_matrix(m: &DenseMatrix, rhs: &DenseMatrix) -> Result<DenseMatrix> {
    if rhs.rows() != m.rows() {
        return Err(Error::InvalidArgument("rhs row count does not match".into()));
    }
    Ok(LuDecomposition::new(m)?.solve_matrix(rhs))
}

pub fn inverse(m: &DenseMatrix) -> Result<DenseMatrix> {
    Ok(LuDecomposition::new(m)?.solve_matrix(&DenseMatrix::identity(m.rows())))
}

/// Determinant as the signed product of partial-pivoting pivots. Never fails:
/// a singular matrix yields (numerically) zero.
pub fn determinant(m: &DenseMatrix) -> f64 {
    assert!(m.is_square(), "determinant of a non-square matrix");
    let (lu, _, sign) = eliminate(m, |_, _| Ok(())).expect("unchecked elimination cannot fail");
    (0..m.rows()).fold(sign, |d, i| d * lu[(i, i)])
}

/// Numerical rank by complete-pivoting elimination: pivots larger than
/// `tol` times the first (largest) pivot are counted.
pub fn rank(m: &DenseMatrix, tol: f64) -> usize {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let first = a.max_abs();
    if first == 0.0 {
        return 0;
    }
    let threshold = tol * first;
    let mut r = 0;
    for k in 0..rows.min(cols) {
        let mut best = (k, k, 0.0);
        for i in k..rows {
            for j in k..cols {
                let v = a[(i, j)].abs();
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        if best.2 <= threshold {
            break;
        }
        let (pi, pj, _) = best;
        for j in 0..cols {
            let tmp = a[(k, j)];
            a[(k, j)] = a[(pi, j)];
            a[(pi, j)] = tmp;
        }
        for i in 0..rows {
            let tmp = a[(i, k)];
            a[(i, k)] = a[(i, pj)];
            a[(i, pj)] = tmp;
        }
        let pivot = a[(k, k)];
        for i in k + 1..rows {
            let factor = a[(i, k)] / pivot;
            for j in k..cols {
                a[(i, j)] -= factor * a[(k, j)];
            }
        }
        r += 1;
    }
    r
}
