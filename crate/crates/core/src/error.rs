use thiserror::Error;

/// Errors produced by the positioning library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid room: {0}")]
    InvalidRoom(String),

    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),

    #[error("invalid radar parameterization: {0}")]
    InvalidParameterization(String),

    #[error("layout search exhausted: none of {candidates} candidates satisfied the constraints")]
    SearchExhausted { candidates: usize },

    #[error("lookup table is empty")]
    EmptyTable,

    #[error("fingerprint has {got} distances, expected {expected}")]
    CardinalityMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
