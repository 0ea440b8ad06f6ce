use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Arguments outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A check could not reach a verdict (quadrature did not converge,
    /// refinement runs disagree, ...). Distinct from a failed check.
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    /// The discrete solution went non-finite or oscillated past the cap.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("bracket search failed: {0}")]
    NoBracket(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
