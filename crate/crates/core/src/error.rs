use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of a physical formula.
    #[error("domain error: {0}")]
    Domain(String),

    /// A value violates a documented invariant (geometry, calibration, config).
    #[error("validation error: {0}")]
    Validation(String),

    #[error("unknown junction `{0}`")]
    UnknownJunction(String),

    #[error("gate voltage {value} V on the {side} pad is outside the ±{limit} V source range")]
    GateOutOfRange {
        side: &'static str,
        value: f64,
        limit: f64,
    },

    /// Malformed structured input; `context` names the file or field.
    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    #[error("trace error: {0}")]
    Trace(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.into(),
        }
    }

    /// True for errors caused by the filesystem rather than by the content of an input.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}
