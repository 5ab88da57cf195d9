use thiserror::Error;

use crate::solver::Trace;

/// Errors produced by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An iterative numeric routine gave up; `best` carries its last estimate.
    #[error("numeric failure: {message} (best estimate {best:e})")]
    NumericFailure { message: String, best: f64 },

    #[error("degenerate subproblem: {0}")]
    DegenerateSubproblem(String),

    #[error("accuracy {target:e} not met after {iterations} inner iterations (best certificate {certificate:e})")]
    AccuracyNotMet {
        target: f64,
        certificate: f64,
        iterations: usize,
    },

    /// An outer iteration failed; the trace collected up to that point is attached.
    #[error("iteration {k} failed: {source}")]
    IterationFailure {
        k: usize,
        #[source]
        source: Box<Error>,
        trace: Trace,
    },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
