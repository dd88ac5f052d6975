use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("filter design failed: {0}")]
    NumericalDesign(String),

    #[error("circulant embedding failed: eigenvalue {value:e} at index {index} (max {max:e})")]
    EmbeddingFailure { index: usize, value: f64, max: f64 },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("optimizer did not converge: {0}")]
    NoConvergence(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("corrupt file: {0}")]
    Corrupt(String),

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },

    #[error("empty dataset")]
    EmptyDataset,

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable category, used for CLI exit reporting.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::InvalidInput(_) => "invalid-input",
            Error::NumericalDesign(_) => "numerical-design",
            Error::EmbeddingFailure { .. } => "embedding-failure",
            Error::DegenerateInput(_) => "degenerate-input",
            Error::DegenerateFit(_) => "degenerate-fit",
            Error::NoConvergence(_) => "no-convergence",
            Error::Format(_) => "format",
            Error::Corrupt(_) => "corrupt-file",
            Error::Parse { .. } => "parse",
            Error::EmptyDataset => "empty-dataset",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub(crate) fn invalid_param(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn invalid_input(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
