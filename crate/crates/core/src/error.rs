use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("user with target rate {rate} has no qualified channel")]
    InfeasibleUser { rate: f64 },

    #[error("rate vector is outside the centralized throughput region")]
    Infeasible,

    #[error("{users} users on {channels} channels is unsupported (need users <= channels)")]
    UnsupportedRegime { users: usize, channels: usize },

    #[error("invalid action: {0}")]
    InvalidAction(String),

    #[error("internal logic error: {0}")]
    Internal(&'static str),

    #[error("insufficient data: need at least {needed} positive points, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("config: `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
