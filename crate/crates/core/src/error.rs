use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The truncation order is too small for the requested accuracy.
    #[error("truncation error: {what} (achieved {achieved:.3e}, tolerance {tol:.3e})")]
    Truncation {
        what: String,
        achieved: f64,
        tol: f64,
    },

    /// An iterative routine failed or produced a non-finite result.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Input built by another routine does not satisfy a required property.
    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
