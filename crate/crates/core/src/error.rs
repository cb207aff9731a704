use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("probability {0} lies outside [0, 1]; inputs are not a valid state/effect pair")]
    ProbabilityOutOfRange(f64),
    #[error("conditioning event has probability {0}")]
    ZeroProbability(f64),
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("ontic space mismatch: {0}")]
    SpaceMismatch(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn unknown(kind: &'static str, name: impl Into<String>) -> Error {
    Error::Unknown { kind, name: name.into() }
}
