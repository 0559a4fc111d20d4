use std::path::PathBuf;

use crate::variant::Variant;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed manifest: {source}")]
    Manifest {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("non-finite value {value} at {location}")]
    NonFinite { value: f64, location: String },
    #[error("coordinates not strictly monotone: {0}")]
    NonMonotone(String),
    #[error("duplicate time key {0}")]
    DuplicateKey(String),
    #[error("gap in time index before {0}")]
    Gap(String),
    #[error("non-positive GDP {value} for {region} in {year}")]
    NonPositiveGdp { region: String, year: i32, value: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("all cells masked")]
    AllMasked,
    #[error("empty averaging window")]
    EmptyWindow,
    #[error("variant mismatch: expected {expected}, got {got}")]
    VariantMismatch { expected: Variant, got: Variant },
    #[error("{variant} moments cannot be computed from {input}")]
    InputMismatch { variant: Variant, input: &'static str },
    #[error("insufficient data: {0}")]
    Insufficient(String),
    #[error("zero-variance regressor")]
    ZeroVariance,
    #[error("zero denominator: {0}")]
    ZeroDenominator(&'static str),
    #[error("year {year} outside available range {start}..={end}")]
    OutOfRange { year: i32, start: i32, end: i32 },
    #[error("coverage gap: no {what} for year {year}")]
    Coverage { what: String, year: i32 },
    #[error("metadata mismatch: {0}")]
    MetadataMismatch(String),
}

impl Error {
    /// True for errors caused by malformed or inconsistent inputs, as opposed
    /// to failures of a computation on otherwise valid inputs.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Io { .. }
                | Error::Manifest { .. }
                | Error::Parse { .. }
                | Error::ShapeMismatch(_)
                | Error::NonFinite { .. }
                | Error::NonMonotone(_)
                | Error::DuplicateKey(_)
                | Error::Gap(_)
                | Error::NonPositiveGdp { .. }
                | Error::InvalidInput(_)
        )
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Parse { path: path.into(), message: message.into() }
    }
}
