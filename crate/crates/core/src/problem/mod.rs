//! Problem model `A ∂ₜu + B ∂ₓu + C u = f` on a rectangle, with boundary data
//! `u(x₀, t) = ψ(t)` and `u(x, t₀) = φ(x)`.

mod examples;
mod grid;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

pub use examples::{example1, example2, nondegenerate_demo, singular_block_problem, SINGULAR_BLOCK};
pub use grid::GridSpec;

/// Matrix-valued coefficient `(x, t) ↦ M(x, t)`.
pub type MatrixField = Arc<dyn Fn(f64, f64) -> DenseMatrix + Send + Sync>;
/// Vector-valued function of `(x, t)`.
pub type VectorField = Arc<dyn Fn(f64, f64) -> Vec<f64> + Send + Sync>;
/// Vector-valued function of one variable (boundary data).
pub type Curve = Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>;

/// Corner mismatch `‖ψ(t₀) − φ(x₀)‖∞` above which a warning is emitted.
pub const CORNER_TOL: f64 = 1e-9;

/// Analytic solution with optional partial derivatives.
#[derive(Clone)]
pub struct ExactSolution {
    pub value: VectorField,
    pub dt: Option<VectorField>,
    pub dx: Option<VectorField>,
}

/// Transforms `P, Q` taking the pencil `A + λB` to
/// `diag{E_d, M, E_p} + λ diag{J, E_l, N}`.
///
/// `m_block` is `l × l`, `n_block` is `p × p`; `None` means identically zero.
#[derive(Clone)]
pub struct CanonicalData {
    pub d: usize,
    pub l: usize,
    pub p: usize,
    pub left: MatrixField,
    pub right: MatrixField,
    pub j: MatrixField,
    pub m_block: Option<MatrixField>,
    pub n_block: Option<MatrixField>,
}

impl CanonicalData {
    pub fn order(&self) -> usize {
        self.d + self.l + self.p
    }

    /// The canonical pencil evaluated at `(x, t, λ)`.
    pub fn canonical_pencil(&self, x: f64, t: f64, lambda: f64) -> DenseMatrix {
        let (d, l) = (self.d, self.l);
        let n = self.order();
        let mut out = DenseMatrix::zeros(n, n);
        for i in 0..d {
            out[(i, i)] = 1.0;
        }
        if d > 0 {
            out.add_block(0, 0, &(self.j)(x, t), lambda);
        }
        for i in d..d + l {
            out[(i, i)] = lambda;
        }
        if let Some(m) = &self.m_block {
            out.add_block(d, d, &m(x, t), 1.0);
        }
        for i in d + l..n {
            out[(i, i)] = 1.0;
        }
        if let Some(nb) = &self.n_block {
            out.add_block(d + l, d + l, &nb(x, t), lambda);
        }
        out
    }
}

/// A linear PDAE system with its boundary data.
///
/// All evaluators are assumed smooth (twice continuously differentiable) on
/// the rectangle they are used on.
#[derive(Clone)]
pub struct PdaeProblem {
    name: String,
    n: usize,
    a: MatrixField,
    b: MatrixField,
    c: MatrixField,
    f: VectorField,
    psi: Curve,
    phi: Curve,
    exact: Option<ExactSolution>,
    canonical: Option<CanonicalData>,
}

impl PdaeProblem {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        n: usize,
        a: MatrixField,
        b: MatrixField,
        c: MatrixField,
        f: VectorField,
        psi: Curve,
        phi: Curve,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("system order must be positive".into()));
        }
        Ok(PdaeProblem { name: name.into(), n, a, b, c, f, psi, phi, exact: None, canonical: None })
    }

    /// Problem whose boundary data is taken from the exact solution.
    #[allow(clippy::too_many_arguments)]
    pub fn from_exact(
        name: impl Into<String>,
        n: usize,
        a: MatrixField,
        b: MatrixField,
        c: MatrixField,
        f: VectorField,
        exact: ExactSolution,
        x0: f64,
        t0: f64,
    ) -> Result<Self> {
        let u = exact.value.clone();
        let u2 = exact.value.clone();
        let psi: Curve = Arc::new(move |t| u(x0, t));
        let phi: Curve = Arc::new(move |x| u2(x, t0));
        Ok(Self::new(name, n, a, b, c, f, psi, phi)?.with_exact(exact))
    }

    pub fn with_exact(mut self, exact: ExactSolution) -> Self {
        self.exact = Some(exact);
        self
    }

    pub fn with_canonical(mut self, canonical: CanonicalData) -> Result<Self> {
        if canonical.order() != self.n {
            return Err(Error::InvalidArgument(format!(
                "canonical block sizes sum to {}, system order is {}",
                canonical.order(),
                self.n
            )));
        }
        self.canonical = Some(canonical);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn a(&self, x: f64, t: f64) -> DenseMatrix {
        (self.a)(x, t)
    }

    pub fn b(&self, x: f64, t: f64) -> DenseMatrix {
        (self.b)(x, t)
    }

    pub fn c(&self, x: f64, t: f64) -> DenseMatrix {
        (self.c)(x, t)
    }

    pub fn f(&self, x: f64, t: f64) -> Vec<f64> {
        (self.f)(x, t)
    }

    pub fn psi(&self, t: f64) -> Vec<f64> {
        (self.psi)(t)
    }

    pub fn phi(&self, x: f64) -> Vec<f64> {
        (self.phi)(x)
    }

    pub fn exact(&self) -> Option<&ExactSolution> {
        self.exact.as_ref()
    }

    pub fn exact_value(&self, x: f64, t: f64) -> Option<Vec<f64>> {
        self.exact.as_ref().map(|e| (e.value)(x, t))
    }

    pub fn canonical(&self) -> Option<&CanonicalData> {
        self.canonical.as_ref()
    }

    /// `A ∂ₜu + B ∂ₓu + C u − f` for the analytic solution.
    pub fn residual(&self, x: f64, t: f64) -> Result<Vec<f64>> {
        let exact =
            self.exact.as_ref().ok_or_else(|| Error::Unsupported(format!("{} has no exact solution", self.name)))?;
        let (Some(dt), Some(dx)) = (&exact.dt, &exact.dx) else {
            return Err(Error::Unsupported(format!("{} has no analytic derivatives", self.name)));
        };
        let u = (exact.value)(x, t);
        let at = self.a(x, t).matvec(&dt(x, t));
        let bx = self.b(x, t).matvec(&dx(x, t));
        let cu = self.c(x, t).matvec(&u);
        let f = self.f(x, t);
        Ok((0..self.n).map(|k| at[k] + bx[k] + cu[k] - f[k]).collect())
    }

    /// Warning text when `ψ(t₀)` and `φ(x₀)` disagree by more than
    /// [`CORNER_TOL`].
    pub fn corner_mismatch(&self, x0: f64, t0: f64) -> Option<String> {
        let psi = self.psi(t0);
        let phi = self.phi(x0);
        let gap = psi.iter().zip(&phi).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        (gap > CORNER_TOL).then(|| format!("boundary data disagree at the corner by {gap:.3e}"))
    }
}

impl fmt::Debug for PdaeProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PdaeProblem")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("exact", &self.exact.is_some())
            .field("canonical", &self.canonical.is_some())
            .finish()
    }
}

/// Built-in problems selectable by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum ExampleId {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "demo")]
    Demo,
    #[serde(rename = "singular")]
    Singular,
}

impl ExampleId {
    pub fn problem(self) -> PdaeProblem {
        match self {
            ExampleId::One => example1(),
            ExampleId::Two => example2(),
            ExampleId::Demo => nondegenerate_demo(),
            ExampleId::Singular => singular_block_problem(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ExampleId::One => "1",
            ExampleId::Two => "2",
            ExampleId::Demo => "demo",
            ExampleId::Singular => "singular",
        }
    }
}

impl FromStr for ExampleId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(ExampleId::One),
            "2" => Ok(ExampleId::Two),
            "demo" => Ok(ExampleId::Demo),
            "singular" => Ok(ExampleId::Singular),
            other => {
                Err(Error::InvalidArgument(format!("unknown example '{other}' (expected 1, 2, demo or singular)")))
            }
        }
    }
}

impl fmt::Display for ExampleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
