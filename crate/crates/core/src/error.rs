use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Elimination hit a pivot below the singularity threshold.
    #[error("matrix is numerically singular at pivot {pivot}")]
    Singular { pivot: usize },

    #[error("eigenvalue iteration did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("polynomial is degenerate: every coefficient is below tolerance")]
    DegeneratePolynomial,

    #[error("pencil A + lambda*B is identically singular at (x, t) = ({x}, {t})")]
    IdenticallySingularPencil { x: f64, t: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(
        "cell system with base node (i, j) = ({i}, {j}) is singular at pivot {pivot}; \
         check the eigenvalue separation r*xi_gbar*xi_J != -xi_g at the cell nodes"
    )]
    SingularCell { i: usize, j: usize, pivot: usize },

    #[error("non-finite values produced by the cell with base node (i, j) = ({i}, {j})")]
    Instability { i: usize, j: usize },

    #[error("unsupported operation: {0}")]
    Unsupported(String),
}

impl Error {
    /// True for failures that originate in floating-point computation rather
    /// than in caller input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Singular { .. }
                | Error::NoConvergence { .. }
                | Error::DegeneratePolynomial
                | Error::IdenticallySingularPencil { .. }
                | Error::SingularCell { .. }
                | Error::Instability { .. }
        )
    }
}
