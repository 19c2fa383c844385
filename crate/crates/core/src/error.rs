use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed input: dimension mismatch, empty list, bad address.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A parameter lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("construction error: {0}")]
    Construction(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// Refused to run because the work would exceed a resource guard.
    #[error("depth guard: {what} would need {needed} nodes (limit {limit}); {hint}")]
    DepthGuard {
        what: String,
        needed: f64,
        limit: f64,
        hint: String,
    },

    #[error("undefined ratio: the denominator ball has zero measure")]
    UndefinedRatio,

    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
