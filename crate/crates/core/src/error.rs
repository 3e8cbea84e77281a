use thiserror::Error;

/// Errors produced by configuration validation and the metrics layer.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration field violates its contract. The field name uses the
    /// dotted path of the offending value (e.g. `control.slot_len`).
    #[error("invalid configuration: {field}: {reason}")]
    InvalidConfig { field: String, reason: String },

    #[error("series is empty")]
    EmptySeries,

    #[error("series has {len} steps, shorter than one window of {window} steps")]
    SeriesTooShort { len: usize, window: usize },

    #[error("window of {window} s is not a positive multiple of dt = {dt} s")]
    BadWindow { window: u64, dt: u64 },

    #[error("experiment comparison is missing configuration {0}")]
    MissingExperiment(String),

    #[error("experiment results come from mismatched scenarios: {0}")]
    MismatchedScenarios(String),
}

impl Error {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
