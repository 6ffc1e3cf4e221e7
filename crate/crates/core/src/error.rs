use thiserror::Error;

/// Errors produced by model construction, evaluation and the verifiers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid code: {0}")]
    InvalidCode(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("path is empty")]
    EmptyPath,

    #[error("path too short: need at least {needed} symbols, got {got}")]
    PathTooShort { needed: usize, got: usize },

    #[error("enumeration of {requested} items exceeds the cap of {cap}")]
    CapExceeded { requested: String, cap: u64 },

    #[error("operation requires an ergodic model but got a mixture")]
    MixtureNotAllowed,

    #[error("entropy rate unavailable for component {index}: {reason}")]
    EntropyRateUnavailable { index: usize, reason: String },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("incomparable spectra: {0}")]
    IncomparableGrids(String),

    #[error("conditioning block {0} has probability zero")]
    ZeroProbabilityContext(String),

    #[error("every component assigns probability zero to the window")]
    Unclassifiable,

    #[error("mixture is not regular: {0}")]
    NotRegular(String),

    #[error("component matching failed: {0}")]
    Unmatched(String),

    #[error("empty spectrum")]
    EmptySpectrum,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
