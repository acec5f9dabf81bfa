use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the assessment toolkit.
#[derive(Debug, Error)]
pub enum IqaError {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot parse cell at row {row}, column {column:?}: {value:?}")]
    Parse {
        row: usize,
        column: String,
        value: String,
    },

    #[error("row {row} has {found} fields, header has {expected}")]
    RaggedRows {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("csv error: {0}")]
    Csv(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("invalid fold count: k={k} for {n_rows} rows")]
    InvalidFoldCount { k: usize, n_rows: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown column {0:?}")]
    UnknownColumn(String),

    #[error("imputer {imputer:?} cannot be trained for column {column:?}: {reason}")]
    UntrainableImputer {
        imputer: String,
        column: String,
        reason: String,
    },

    #[error("imputer training failed for column {column:?}: {reason}")]
    ImputerTraining { column: String, reason: String },

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("config error at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("unsupported schema version {found}, expected {expected}")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("corrupt model: {0}")]
    CorruptModel(String),
}

pub type Result<T, E = IqaError> = std::result::Result<T, E>;

impl IqaError {
    /// An I/O failure tied to `path`.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        IqaError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        IqaError::DegenerateInput(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        IqaError::InvalidArgument(msg.into())
    }
}
