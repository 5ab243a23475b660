use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Two objects that must live on the same grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A value violates the structural invariants of its type.
    #[error("invalid {what}: {detail}")]
    Invalid { what: &'static str, detail: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A modelling hypothesis (growth, level convexity, exponent growth) failed.
    #[error("{label} violated: {detail}")]
    Contract { label: &'static str, detail: String },

    /// The study sits on the boundary of the dichotomy and has no verdict.
    #[error("ill-posed study: {0}")]
    IllPosed(String),

    #[error("solver: {0}")]
    Solver(String),
}

impl Error {
    pub(crate) fn invalid(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
