//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

use crate::solver::TraceRecord;

#[derive(Debug, Error)]
pub enum Error {
    /// A function or gradient evaluation produced a non-finite value.
    #[error("non-finite {what} while probing coordinate {coordinate}")]
    EvaluationFailure { what: &'static str, coordinate: usize },

    /// An iterate left the representable range. Carries whatever trace was
    /// accumulated before the blow-up so callers can persist it.
    #[error("iterate diverged (non-finite) at outer step {outer}, inner step {inner}")]
    Diverged {
        outer: u64,
        inner: u64,
        partial_trace: Vec<TraceRecord>,
    },

    /// Operation needs an exact inner oracle the problem does not provide.
    #[error("problem `{problem}` has no inner oracle; required for {operation}")]
    OracleRequired {
        problem: String,
        operation: &'static str,
    },

    /// An estimator found no usable samples.
    #[error("estimation failed: {0}")]
    EstimationFailed(String),

    /// Bad argument, configuration value or precondition violation.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown problem `{name}`; valid names: {valid}")]
    UnknownProblem { name: String, valid: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed persisted artifact; `line` is 1-based.
    #[error("{file}:{line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
