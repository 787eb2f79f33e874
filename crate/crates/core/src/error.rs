use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the binarization and evaluation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },

    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    Shape {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("invalid dimensions {width}x{height}: {message}")]
    Dimensions {
        width: usize,
        height: usize,
        message: String,
    },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unmatched dataset files: {}", .orphans.join(", "))]
    Matching { orphans: Vec<String> },

    #[error("evaluation error for '{id}': {message}")]
    Evaluation { id: String, message: String },

    #[error("missing aggregation cell: method '{method}', dataset '{dataset}', metric {metric}")]
    Aggregation {
        method: String,
        dataset: String,
        metric: String,
    },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("report serialization: {0}")]
    Serialization(String),
}

/// Coarse error category, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Data,
    UndefinedMetric,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn shape(expected: (usize, usize), found: (usize, usize)) -> Self {
        Error::Shape { expected, found }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config(_) | Error::Unsupported(_) => ErrorKind::Usage,
            Error::UndefinedMetric(_) => ErrorKind::UndefinedMetric,
            _ => ErrorKind::Data,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
