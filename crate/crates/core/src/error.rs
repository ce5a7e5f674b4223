use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A value violates a type invariant (negative PSD, unsorted grid, ...).
    #[error("invariant violation: {0}")]
    Invariant(String),

    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unit mismatch: expected {expected}, found {found}")]
    UnitMismatch { expected: String, found: String },

    /// Modulation index on a Bessel zero: the PDH signal vanishes identically.
    #[error("degenerate signal: {0}")]
    Degenerate(String),

    #[error("fit failed: {reason} (residual norm {residual_norm:.3e})")]
    FitFailure { reason: String, residual_norm: f64 },

    #[error("ambiguous fit window: {0}")]
    Ambiguous(String),

    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },

    /// A configuration value failed validation; `key` is the offending key.
    #[error("invalid `{key}`: {message}")]
    Validation { key: String, message: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("missing scenario section [{section}]: {message}")]
    MissingSection { section: String, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Short machine-readable tag used on the CLI diagnostic line.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Invariant(_) => "invariant",
            Error::Domain(_) => "domain",
            Error::UnitMismatch { .. } => "unit",
            Error::Degenerate(_) => "degenerate",
            Error::FitFailure { .. } => "fit",
            Error::Ambiguous(_) => "ambiguous",
            Error::Parse { .. } => "parse",
            Error::Validation { .. } => "validation",
            Error::Config(_) => "config",
            Error::MissingSection { .. } => "missing-section",
            Error::Io { .. } => "io",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn validation(key: &str, message: impl Into<String>) -> Self {
        Error::Validation {
            key: key.to_string(),
            message: message.into(),
        }
    }
}
