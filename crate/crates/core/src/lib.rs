//! Spline-collocation implicit difference schemes for linear
//! partial differential-algebraic systems
//!
//! ```text
//! A(x,t) ∂ₜu + B(x,t) ∂ₓu + C(x,t) u = f(x,t),   u(x₀,t) = ψ(t),  u(x,t₀) = φ(x)
//! ```
//!
//! with possibly singular `A` and `B`. The unknown is approximated on each
//! grid cell by a polynomial of degree `m₁` in `x` and `m₂` in `t`, giving a
//! scheme of order `O(h^m₁) + O(τ^m₂)`.
//!
//! Modules:
//! * [`stencil`] – differentiation weights on equidistant nodes.
//! * [`linalg`] – dense kernels (LU, rank, eigenvalues, exponential, roots).
//! * [`problem`] – the problem model, grids and built-in examples.
//! * [`solver`] – cell assembly, the march over the grid, error norms.
//! * [`pencil`] – diagnostics of the pencil `A + λB`.
//! * [`theory`] – numerical checks of the identities behind the stability
//!   argument.
//! * [`cli`] – the `pdae` command-line front end.

pub mod cli;
pub mod error;
pub mod linalg;
pub mod pencil;
pub mod problem;
pub mod solver;
pub mod stencil;
pub mod theory;

pub use error::{Error, Result};
