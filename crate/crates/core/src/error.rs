use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("series has {len} samples, at least {min} required")]
    SeriesTooShort { len: usize, min: usize },

    #[error("sample {index} is not finite")]
    NonFiniteSample { index: usize },

    #[error("brute-force oracle limited to {max} samples, got {len}")]
    OracleSizeExceeded { len: usize, max: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("persistence diagram has no finite pairs")]
    EmptyDiagram,

    #[error("optimizer failed to decrease the cost after {iterations} iterations")]
    OptimizerDiverged { iterations: usize },

    #[error("insufficient range of step sizes for a compensation fit: {0}")]
    InsufficientDeltaRange(String),

    #[error("trajectory diverged at step {step}")]
    IntegrationOverflow { step: usize },

    #[error("signal has zero variance")]
    DegenerateSignal,

    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Stable identifier used in machine-readable error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::SeriesTooShort { .. } => "SeriesTooShort",
            Error::NonFiniteSample { .. } => "NonFiniteSample",
            Error::OracleSizeExceeded { .. } => "OracleSizeExceeded",
            Error::Domain(_) => "DomainError",
            Error::EmptyDiagram => "EmptyDiagram",
            Error::OptimizerDiverged { .. } => "OptimizerDiverged",
            Error::InsufficientDeltaRange(_) => "InsufficientDeltaRange",
            Error::IntegrationOverflow { .. } => "IntegrationOverflow",
            Error::DegenerateSignal => "DegenerateSignal",
            Error::FileNotFound(_) => "FileNotFound",
            Error::Parse { .. } => "ParseError",
            Error::Io(_) => "IoError",
            Error::Json(_) => "JsonError",
        }
    }
}
