use thiserror::Error;

use crate::expr::{EvalError, ParseError};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("{source} (at point {point:?})")]
    Eval {
        point: Vec<f64>,
        #[source]
        source: EvalError,
    },

    /// Schema or validation failure while loading a manifest. `offset` is a
    /// byte offset into the manifest text (or into the offending expression)
    /// when one is known.
    #[error("manifest error in `{field}`{}: {message}", .offset.map(|o| format!(" at byte {o}")).unwrap_or_default())]
    Manifest {
        field: String,
        offset: Option<usize>,
        message: String,
    },

    #[error("metric is not positive definite at {point:?} (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { point: Vec<f64>, min_eigenvalue: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn manifest(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Manifest {
            field: field.into(),
            offset: None,
            message: message.into(),
        }
    }

    /// True for errors caused by the input manifest rather than by evaluation.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Parse(_) | Error::Manifest { .. } | Error::NotPositiveDefinite { .. })
    }
}
