use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or truncated file, or a sidecar that disagrees with the payload.
    #[error("format error: {0}")]
    Format(String),

    /// Well-formed input whose values cannot be used (NaN payloads, all-degenerate volumes).
    #[error("data error: {0}")]
    Data(String),

    /// Caller asked for something invalid (bad names, empty batches, rakes outside the domain).
    #[error("usage error: {0}")]
    Usage(String),

    /// Grid too small for the requested operator.
    #[error("shape error: {0}")]
    Shape(String),

    #[error("point {0:?} lies outside [-1, 1]^3")]
    OutOfDomain([f64; 3]),

    /// Non-finite values met during evaluation or training.
    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the command-line front end: 2 for usage errors, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 2,
            _ => 1,
        }
    }
}
