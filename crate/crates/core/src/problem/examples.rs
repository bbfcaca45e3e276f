//! Built-in problems.
//!
//! Examples 1 and 2 are degenerate (`det A ≡ det B ≡ 0`) systems with known
//! solutions and canonical transforms; the demo is a nondegenerate
//! hyperbolic system built by manufactured solutions; the singular block
//! problem exists to exercise failure paths.

use std::sync::Arc;

use super::{CanonicalData, ExactSolution, MatrixField, PdaeProblem, VectorField};
use crate::linalg::{inverse, DenseMatrix};

fn mat(n: usize, entries: &[(usize, usize, f64)]) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(n, n);
    for &(i, j, v) in entries {
        m[(i, j)] = v;
    }
    m
}

fn field(f: impl Fn(f64, f64) -> DenseMatrix + Send + Sync + 'static) -> MatrixField {
    Arc::new(f)
}

fn vfield(f: impl Fn(f64, f64) -> Vec<f64> + Send + Sync + 'static) -> VectorField {
    Arc::new(f)
}

/// Six-component system with variable coefficients and `d = l = p = 2`.
///
/// Exact solution `u = (xt, x+t, x, e^(x+t), e^(xt), 1)`. The canonical
/// transforms give `J = diag(e^(sin(x+t))/e^(xt), xt/(1+xt))`, `M = N = 0`.
pub fn example1() -> PdaeProblem {
    let a = field(|x, t| {
        let xt = x * t;
        mat(6, &[(0, 0, 1.0), (0, 3, 1.0), (1, 4, xt.exp()), (3, 0, 1.0 + xt), (4, 2, 1.0)])
    });
    let b = field(|x, t| {
        let th = x + t;
        mat(6, &[(1, 4, th.sin().exp()), (2, 5, 1.0), (3, 0, x * t), (5, 1, 1.0)])
    });
    let c = field(|x, t| {
        let th = x + t;
        mat(6, &[(1, 4, 2.0 * x * t), (2, 5, th), (3, 0, 1.0), (4, 2, 1.0)])
    });
    let f = vfield(|x, t| {
        let th = x + t;
        let ext = (x * t).exp();
        vec![th.exp() + x, ext * (x * ext + t * th.sin().exp() + 2.0 * x * t), th, x * (1.0 + t * (th + 1.0)), x, 1.0]
    });
    let exact = ExactSolution {
        value: vfield(|x, t| vec![x * t, x + t, x, (x + t).exp(), (x * t).exp(), 1.0]),
        dt: Some(vfield(|x, t| vec![x, 1.0, 0.0, (x + t).exp(), x * (x * t).exp(), 0.0])),
        dx: Some(vfield(|x, t| vec![t, 1.0, 1.0, (x + t).exp(), t * (x * t).exp(), 0.0])),
    };
    let canonical = CanonicalData {
        d: 2,
        l: 2,
        p: 2,
        left: field(|x, t| {
            let xt = x * t;
            mat(
                6,
                &[(0, 1, 1.0 / xt.exp()), (1, 3, 1.0 / (1.0 + xt)), (2, 2, 1.0), (3, 5, 1.0), (4, 4, 1.0), (5, 0, 1.0)],
            )
        }),
        right: field(|_, _| {
            mat(6, &[(0, 1, 1.0), (1, 3, 1.0), (2, 4, 1.0), (3, 1, -1.0), (3, 5, 1.0), (4, 0, 1.0), (5, 2, 1.0)])
        }),
        j: field(|x, t| {
            let xt = x * t;
            DenseMatrix::from_diag(&[(x + t).sin().exp() / xt.exp(), xt / (1.0 + xt)])
        }),
        m_block: None,
        n_block: None,
    };
    PdaeProblem::from_exact("example 1", 6, a, b, c, f, exact, 0.0, 0.0)
        .and_then(|p| p.with_canonical(canonical))
        .expect("example 1 is well formed")
}

fn example2_j(x: f64, t: f64) -> DenseMatrix {
    let e = (x + t).exp();
    let g = 1.0 + t * x.exp();
    mat(5, &[(0, 0, e), (0, 1, 1.0), (1, 1, e), (1, 2, 1.0), (2, 2, e), (3, 3, g), (3, 4, 1.0), (4, 4, g)])
}

/// Seven-component system already in canonical form with multiple
/// characteristic roots: `-e^(-(x+t))` (triple), `-1/(1+t e^x)` (double) and 0.
pub fn example2() -> PdaeProblem {
    let a = field(|_, _| DenseMatrix::from_diag(&[1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 1.0]));
    let b = field(|x, t| {
        let mut m = DenseMatrix::zeros(7, 7);
        m.set_block(0, 0, &example2_j(x, t));
        m[(5, 5)] = 1.0;
        m
    });
    let c = field(|x, t| {
        let th = x + t;
        let e = th.exp();
        let rows: [[f64; 7]; 7] = [
            [x * x + t, 0.0, 1.0, 1.0 + x * t, -e, 0.0, 0.0],
            [0.0, x * x, x * t, 0.0, 0.0, 1.0, th],
            [1.0, 0.0, 0.0, 0.0, 1.0, x * t, 0.0],
            [0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
            [0.0; 7],
            [x * e, 1.0, x * x * t, 0.0, th, 0.0, 0.0],
            [0.0, 0.0, e, 0.0, 0.0, 1.0, 0.0],
        ];
        DenseMatrix::from_fn(7, 7, |i, j| rows[i][j])
    });
    let f = vfield(|x, t| {
        let th = x + t;
        let e = th.exp();
        let e2 = (2.0 * th).exp();
        let (x2, x3) = (x * x, x * x * x);
        vec![
            e2 + (x2 + t) * e + 2.0 * x * t + (1.0 + x * t) * (x - t) + 1.0,
            e + 2.0 * t + x3 + x2 * t + 3.0 * x2 * t * t + x * t.exp() + x3 * t + 1.0,
            (2.0 * t + 1.0) * e + 2.0 * x + x2 * t * t.exp() + 1.0,
            2.0 * x * t + t * x.exp(),
            0.0,
            x * e2 + t.exp() + 2.0 * th + 2.0 * x3 * t * t,
            x2 + 2.0 * x * t * e + x * t.exp(),
        ]
    });
    let exact = ExactSolution {
        value: vfield(|x, t| {
            let th = x + t;
            vec![th.exp(), th, 2.0 * x * t, x - t, 1.0, x * t.exp(), x * x * t]
        }),
        dt: Some(vfield(|x, t| vec![(x + t).exp(), 1.0, 2.0 * x, -1.0, 0.0, x * t.exp(), x * x])),
        dx: Some(vfield(|x, t| vec![(x + t).exp(), 1.0, 2.0 * t, 1.0, 0.0, t.exp(), 2.0 * x * t])),
    };
    let canonical = CanonicalData {
        d: 5,
        l: 1,
        p: 1,
        left: field(|_, _| DenseMatrix::identity(7)),
        right: field(|_, _| DenseMatrix::identity(7)),
        j: field(example2_j),
        m_block: None,
        n_block: None,
    };
    PdaeProblem::from_exact("example 2", 7, a, b, c, f, exact, 0.0, 0.0)
        .and_then(|p| p.with_canonical(canonical))
        .expect("example 2 is well formed")
}

fn demo_a(x: f64, _t: f64) -> DenseMatrix {
    mat(2, &[(0, 0, 1.0), (0, 1, 0.2 * x), (1, 1, 1.0)])
}

fn demo_b(x: f64, t: f64) -> DenseMatrix {
    mat(2, &[(0, 0, 1.0 + 0.5 * t), (0, 1, 0.1), (1, 1, 2.0 + x)])
}

fn demo_c(x: f64, t: f64) -> DenseMatrix {
    mat(2, &[(0, 0, 0.5), (1, 0, x * t), (1, 1, 1.0)])
}

/// Strictly hyperbolic 2×2 system with nonsingular `A` and `B`.
///
/// `A⁻¹B` is upper triangular with distinct positive diagonal
/// `1 + t/2` and `2 + x`; the exact solution is
/// `u = (sin(x + 2t), eˣ cos t)` and `f` is manufactured from it.
pub fn nondegenerate_demo() -> PdaeProblem {
    let u = |x: f64, t: f64| vec![(x + 2.0 * t).sin(), x.exp() * t.cos()];
    let ut = |x: f64, t: f64| vec![2.0 * (x + 2.0 * t).cos(), -x.exp() * t.sin()];
    let ux = |x: f64, t: f64| vec![(x + 2.0 * t).cos(), x.exp() * t.cos()];
    let f = vfield(move |x, t| {
        let a = demo_a(x, t).matvec(&ut(x, t));
        let b = demo_b(x, t).matvec(&ux(x, t));
        let c = demo_c(x, t).matvec(&u(x, t));
        (0..2).map(|k| a[k] + b[k] + c[k]).collect()
    });
    let exact = ExactSolution { value: vfield(u), dt: Some(vfield(ut)), dx: Some(vfield(ux)) };
    let canonical = CanonicalData {
        d: 2,
        l: 0,
        p: 0,
        left: field(|x, t| inverse(&demo_a(x, t)).expect("A is unit upper triangular")),
        right: field(|_, _| DenseMatrix::identity(2)),
        j: field(|x, t| inverse(&demo_a(x, t)).expect("A is unit upper triangular").matmul(&demo_b(x, t))),
        m_block: None,
        n_block: None,
    };
    PdaeProblem::from_exact("nondegenerate demo", 2, field(demo_a), field(demo_b), field(demo_c), f, exact, 0.0, 0.0)
        .and_then(|p| p.with_canonical(canonical))
        .expect("demo is well formed")
}

/// Region of `[0, 1]²` where [`singular_block_problem`] has `A = B = C = 0`.
pub const SINGULAR_BLOCK: (f64, f64) = (0.45, 0.75);

fn in_singular_block(x: f64, t: f64) -> bool {
    let (lo, hi) = SINGULAR_BLOCK;
    (lo..=hi).contains(&x) && (lo..=hi).contains(&t)
}

/// Scalar transport `u_t + u_x = 0` whose coefficients all vanish on the
/// square [`SINGULAR_BLOCK`]², so any cell touching that square is singular.
pub fn singular_block_problem() -> PdaeProblem {
    let unit = field(|x, t| {
        let v = if in_singular_block(x, t) { 0.0 } else { 1.0 };
        DenseMatrix::from_diag(&[v])
    });
    let exact = ExactSolution {
        value: vfield(|x, t| vec![(x - t).sin()]),
        dt: Some(vfield(|x, t| vec![-(x - t).cos()])),
        dx: Some(vfield(|x, t| vec![(x - t).cos()])),
    };
    PdaeProblem::from_exact(
        "singular block",
        1,
        unit.clone(),
        unit,
        field(|_, _| DenseMatrix::zeros(1, 1)),
        vfield(|_, _| vec![0.0]),
        exact,
        0.0,
        0.0,
    )
    .expect("singular block problem is well formed")
}
