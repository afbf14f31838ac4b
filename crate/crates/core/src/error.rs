use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown node id {0}")]
    UnknownNode(usize),

    #[error("unknown node label {0:?}")]
    UnknownLabel(String),

    #[error("{element} element missing from page export")]
    MissingElement { element: &'static str },

    #[error("malformed XML: {0}")]
    Xml(String),

    #[error("document {title:?} is not in the biography set")]
    NotABiography { title: String },

    #[error("{measure} did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        measure: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(&'static str),

    #[error("power-law fit needs at least 3 non-empty bins, found {0}")]
    InsufficientBins(usize),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable short name used in machine-readable error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::UnknownNode(_) => "unknown_node",
            Error::UnknownLabel(_) => "unknown_label",
            Error::MissingElement { .. } => "missing_element",
            Error::Xml(_) => "xml",
            Error::NotABiography { .. } => "not_a_biography",
            Error::NotConverged { .. } => "not_converged",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::UndefinedCorrelation(_) => "undefined_correlation",
            Error::InsufficientBins(_) => "insufficient_bins",
            Error::Empty(_) => "empty",
            Error::Config(_) => "config",
            Error::File { .. } => "file",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }

    pub(crate) fn file(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::File {
            path: path.into(),
            source,
        }
    }
}
