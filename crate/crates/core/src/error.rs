use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("job {id} is invalid: {reason}")]
    InvalidJob { id: u64, reason: String },

    #[error("job {job} does not fit at slot {slot}: capacity exceeded")]
    Capacity { job: u64, slot: usize },

    #[error("job {0} is already placed")]
    DuplicatePlacement(u64),

    #[error("invalid slot set for job {job}: {reason}")]
    InvalidSlots { job: u64, reason: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid tariff: {0}")]
    InvalidTariff(String),

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("selection is empty: {0}")]
    EmptySelection(String),

    #[error("instance too large for the exact solver: {what} = {value} exceeds limit {limit}")]
    LimitExceeded {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("sweep point {point}: {source}")]
    SweepPoint {
        point: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

impl Error {
    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
