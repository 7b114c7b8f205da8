use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("operator needs {what}, got k={k}, l={l}")]
    Order { what: &'static str, k: usize, l: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("sinogram grid cannot pair (s, theta) with (-s, theta+pi): {0}")]
    GridParity(String),

    #[error("gaussian term at ({cx:.4}, {cy:.4}) with width {sigma:.4} does not fit in the extent with a 4-sigma margin")]
    SupportOverflow { cx: f64, cy: f64, sigma: f64 },

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("malformed header: {0}")]
    MalformedHeader(String),

    #[error("magic mismatch: expected MTF1, found {0:?}")]
    MagicMismatch(String),

    #[error("truncated payload: expected {expected} bytes, found {found}")]
    TruncatedPayload { expected: usize, found: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
