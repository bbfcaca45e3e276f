//! Eigenvalues of small real matrices: balancing, reduction to upper
//! Hessenberg form by stabilized elimination, then Francis double-shift QR.

use num_complex::Complex64;

use super::DenseMatrix;
use crate::error::{Error, Result};

/// Largest order accepted by [`eig_small`].
pub const MAX_EIG_ORDER: usize = 24;

const MAX_QR_ITERATIONS: usize = 60;

/// All eigenvalues of a square matrix of order at most [`MAX_EIG_ORDER`],
/// sorted by real part then imaginary part.
pub fn eig_small(m: &DenseMatrix) -> Result<Vec<Complex64>> {
    if !m.is_square() {
        return Err(Error::InvalidArgument("eigenvalues need a square matrix".into()));
    }
    let n = m.rows();
    if n > MAX_EIG_ORDER {
        return Err(Error::InvalidArgument(format!("order {n} exceeds the small-matrix limit {MAX_EIG_ORDER}")));
    }
    if !m.is_finite() {
        return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut a = m.clone();
    balance(&mut a);
    to_hessenberg(&mut a);
    let mut eig = hessenberg_qr(&mut a)?;
    eig.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    Ok(eig)
}

/// Parlett–Reinsch balancing by powers of two; preserves eigenvalues exactly.
fn balance(a: &mut DenseMatrix) {
    const RADIX: f64 = 2.0;
    let n = a.rows();
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for j in 0..n {
                    a[(i, j)] *= g;
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

/// Similarity reduction to upper Hessenberg form by Gaussian elimination
/// with pivoting. Entries below the subdiagonal are zeroed on exit.
fn to_hessenberg(a: &mut DenseMatrix) {
    let n = a.rows();
    for m in 1..n.saturating_sub(1) {
        let mut x = 0.0f64;
        let mut piv = m;
        for j in m..n {
            if a[(j, m - 1)].abs() > x.abs() {
                x = a[(j, m - 1)];
                piv = j;
            }
        }
        if piv != m {
            for j in m - 1..n {
                let t = a[(piv, j)];
                a[(piv, j)] = a[(m, j)];
                a[(m, j)] = t;
            }
            for j in 0..n {
                let t = a[(j, piv)];
                a[(j, piv)] = a[(j, m)];
                a[(j, m)] = t;
            }
        }
        if x != 0.0 {
            for i in m + 1..n {
                let mut y = a[(i, m - 1)];
                if y != 0.0 {
                    y /= x;
                    a[(i, m - 1)] = y;
                    for j in m..n {
                        a[(i, j)] -= y * a[(m, j)];
                    }
                    for j in 0..n {
                        a[(j, m)] += y * a[(j, i)];
                    }
                }
            }
        }
    }
    for i in 2..n {
        for j in 0..i - 1 {
            a[(i, j)] = 0.0;
        }
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix (destroys `h`).
fn hessenberg_qr(h: &mut DenseMatrix) -> Result<Vec<Complex64>> {
    let n = h.rows();
    let mut wr = vec![Complex64::new(0.0, 0.0); n];
    let eps = f64::EPSILON;
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += h[(i, j)].abs();
        }
    }
    // Indices are signed because the active window shrinks past zero.
    let at = |h: &DenseMatrix, i: isize, j: isize| h[(i as usize, j as usize)];
    let mut nn: isize = n as isize - 1;
    let mut t = 0.0;
    let (mut p, mut q, mut r) = (0.0, 0.0, 0.0);
    let (mut x, mut y, mut z, mut w);
    while nn >= 0 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l > 0 {
                let mut s = at(h, l - 1, l - 1).abs() + at(h, l, l).abs();
                if s == 0.0 {
                    s = anorm;
                }
                if at(h, l, l - 1).abs() <= eps * s {
                    h[(l as usize, l as usize - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            x = at(h, nn, nn);
            if l == nn {
                wr[nn as usize] = Complex64::new(x + t, 0.0);
                nn -= 1;
            } else {
                y = at(h, nn - 1, nn - 1);
                w = at(h, nn, nn - 1) * at(h, nn - 1, nn);
                if l == nn - 1 {
                    p = 0.5 * (y - x);
                    q = p * p + w;
                    z = q.abs().sqrt();
                    x += t;
                    if q >= 0.0 {
                        z = p + sign(z, p);
                        let hi = x + z;
                        let lo = if z != 0.0 { x - w / z } else { hi };
                        wr[nn as usize - 1] = Complex64::new(hi, 0.0);
                        wr[nn as usize] = Complex64::new(lo, 0.0);
                    } else {
                        wr[nn as usize] = Complex64::new(x + p, -z);
                        wr[nn as usize - 1] = Complex64::new(x + p, z);
                    }
                    nn -= 2;
                } else {
                    if its == MAX_QR_ITERATIONS {
                        return Err(Error::NoConvergence { iterations: its });
                    }
                    if its % 10 == 0 && its > 0 {
                        // Exceptional shift.
                        t += x;
                        for i in 0..=nn {
                            h[(i as usize, i as usize)] -= x;
                        }
                        let s = at(h, nn, nn - 1).abs() + at(h, nn - 1, nn - 2).abs();
                        x = 0.75 * s;
                        y = x;
                        w = -0.4375 * s * s;
                    }
                    its += 1;
                    let mut m = nn - 2;
                    while m >= l {
                        z = at(h, m, m);
                        r = x - z;
                        let s = y - z;
                        p = (r * s - w) / at(h, m + 1, m) + at(h, m, m + 1);
                        q = at(h, m + 1, m + 1) - z - r - s;
                        r = at(h, m + 2, m + 1);
                        let s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = at(h, m, m - 1).abs() * (q.abs() + r.abs());
                        let v = p.abs() * (at(h, m - 1, m - 1).abs() + z.abs() + at(h, m + 1, m + 1).abs());
                        if u <= eps * v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in m..nn - 1 {
                        h[(i as usize + 2, i as usize)] = 0.0;
                        if i != m {
                            h[(i as usize + 2, i as usize - 1)] = 0.0;
                        }
                    }
                    let mut k = m;
                    while k < nn {
                        if k != m {
                            p = at(h, k, k - 1);
                            q = at(h, k + 1, k - 1);
                            r = 0.0;
                            if k + 1 != nn {
                                r = at(h, k + 2, k - 1);
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != 0.0 {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        let s = sign((p * p + q * q + r * r).sqrt(), p);
                        if s != 0.0 {
                            let (ku, kk) = (k as usize, k);
                            if k == m {
                                if l != m {
                                    h[(ku, ku - 1)] = -h[(ku, ku - 1)];
                                }
                            } else {
                                h[(ku, ku - 1)] = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for j in kk..=nn {
                                let ju = j as usize;
                                p = h[(ku, ju)] + q * h[(ku + 1, ju)];
                                if k + 1 != nn {
                                    p += r * h[(ku + 2, ju)];
                                    h[(ku + 2, ju)] -= p * z;
                                }
                                h[(ku + 1, ju)] -= p * y;
                                h[(ku, ju)] -= p * x;
                            }
                            let mmin = if nn < k + 3 { nn } else { k + 3 };
                            for i in l..=mmin {
                                let iu = i as usize;
                                p = x * h[(iu, ku)] + y * h[(iu, ku + 1)];
                                if k + 1 != nn {
                                    p += z * h[(iu, ku + 2)];
                                    h[(iu, ku + 2)] -= p * r;
                                }
                                h[(iu, ku + 1)] -= p * q;
                                h[(iu, ku)] -= p;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if l + 1 >= nn {
                break;
            }
        }
    }
    Ok(wr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::determinant;
    use proptest::prelude::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn diagonal_spectrum() {
        let e = eig_small(&DenseMatrix::from_diag(&[3.0, 1.0, 2.0])).unwrap();
        let re: Vec<f64> = e.iter().map(|z| z.re).collect();
        assert_eq!(re, vec![1.0, 2.0, 3.0]);
        assert!(e.iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn complex_pair_of_degree_two_stencil() {
        let m = DenseMatrix::from_rows(&[&[0.0, 0.5], &[-2.0, 1.5]]).unwrap();
        let e = eig_small(&m).unwrap();
        let s7 = 7f64.sqrt() / 4.0;
        assert!(close(e[0], Complex64::new(0.75, -s7), 1e-12));
        assert!(close(e[1], Complex64::new(0.75, s7), 1e-12));
    }

    #[test]
    fn companion_of_factored_quadratic() {
        // x^2 - 3x + 2
        let m = DenseMatrix::from_rows(&[&[3.0, -2.0], &[1.0, 0.0]]).unwrap();
        let e = eig_small(&m).unwrap();
        assert!(close(e[0], Complex64::new(1.0, 0.0), 1e-12));
        assert!(close(e[1], Complex64::new(2.0, 0.0), 1e-12));
    }

    #[test]
    fn rejects_oversized_input() {
        assert!(eig_small(&DenseMatrix::identity(MAX_EIG_ORDER + 1)).is_err());
        assert!(eig_small(&DenseMatrix::zeros(0, 0)).unwrap().is_empty());
    }

    #[test]
    fn rotation_block() {
        let m = DenseMatrix::from_rows(&[&[0.0, -1.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 0.0, 5.0]]).unwrap();
        let e = eig_small(&m).unwrap();
        assert!(close(e[0], Complex64::new(0.0, -1.0), 1e-12));
        assert!(close(e[1], Complex64::new(0.0, 1.0), 1e-12));
        assert!(close(e[2], Complex64::new(5.0, 0.0), 1e-12));
    }

    /// det(M - xi I) for complex xi via the real 2n x 2n embedding
    /// [[Re, -Im], [Im, Re]], whose determinant is |det|^2.
    fn char_det_modulus(m: &DenseMatrix, xi: Complex64) -> f64 {
        let n = m.rows();
        let big = DenseMatrix::from_fn(2 * n, 2 * n, |i, j| {
            let (bi, bj) = (i / n, j / n);
            let (ii, jj) = (i % n, j % n);
            let re = m[(ii, jj)] - if ii == jj { xi.re } else { 0.0 };
            let im = if ii == jj { -xi.im } else { 0.0 };
            match (bi, bj) {
                (0, 0) | (1, 1) => re,
                (0, 1) => -im,
                _ => im,
            }
        });
        determinant(&big).abs().sqrt()
    }

    proptest! {
        #[test]
        fn eigenvalues_annihilate_characteristic_polynomial(
            n in 1usize..9,
            entries in prop::collection::vec(-3.0f64..3.0, 64),
        ) {
            let m = DenseMatrix::from_fn(n, n, |i, j| entries[i * 8 + j]);
            let e = eig_small(&m).unwrap();
            prop_assert_eq!(e.len(), n);
            let norm = m.norm_inf().max(1.0);
            for xi in e {
                prop_assert!(char_det_modulus(&m, xi) <= 1e-6 * norm.powi(n as i32));
            }
        }

        #[test]
        fn trace_equals_eigenvalue_sum(
            n in 1usize..12,
            entries in prop::collection::vec(-3.0f64..3.0, 144),
        ) {
            let m = DenseMatrix::from_fn(n, n, |i, j| entries[i * 12 + j]);
            let e = eig_small(&m).unwrap();
            let sum: Complex64 = e.iter().sum();
            let trace: f64 = (0..n).map(|i| m[(i, i)]).sum();
            prop_assert!((sum.re - trace).abs() <= 1e-9 * (1.0 + m.norm_inf()) * n as f64);
            prop_assert!(sum.im.abs() <= 1e-9 * (1.0 + m.norm_inf()) * n as f64);
        }
    }
}
