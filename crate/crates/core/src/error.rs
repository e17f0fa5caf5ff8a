use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("ARFF parse error at line {line}: {message}")]
    Arff { line: usize, message: String },

    #[error("CSV error at row {row}: {message}")]
    Csv { row: usize, message: String },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid label value {value:?} for label `{label}`; expected 0 or 1")]
    InvalidLabel { label: String, value: String },

    #[error("no label count given and the @relation line carries no `-C` token")]
    MissingLabelSpec,

    #[error("input width mismatch: model expects {expected}, got {got}")]
    WidthMismatch { expected: usize, got: usize },

    #[error("non-finite feature value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn arff(line: usize, message: impl Into<String>) -> Self {
        Error::Arff {
            line,
            message: message.into(),
        }
    }

    /// True for errors caused by the input data rather than by how the tool was invoked.
    pub fn is_data_error(&self) -> bool {
        !matches!(self, Error::InvalidArgument(_) | Error::Config(_))
    }
}
