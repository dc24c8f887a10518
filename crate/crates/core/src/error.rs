use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical procedure failed to reach its accuracy target.
    #[error("numerical error in {context}: {detail}")]
    Numerical { context: String, detail: String },

    /// The circulant embedding of the requested covariance is not
    /// nonnegative definite.
    #[error(
        "circulant embedding failed: min eigenvalue {min_eigenvalue:e} < -1e-8 * max eigenvalue {max_eigenvalue:e}"
    )]
    EmbeddingFailure {
        min_eigenvalue: f64,
        max_eigenvalue: f64,
    },

    /// An integral grew without bound under refinement.
    #[error("divergent integral: {0}")]
    Divergence(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numerical(context: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Numerical {
            context: context.into(),
            detail: detail.into(),
        }
    }

    /// True for failures of a numerical procedure, as opposed to invalid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Numerical { .. } | Error::EmbeddingFailure { .. } | Error::Divergence(_)
        )
    }
}
