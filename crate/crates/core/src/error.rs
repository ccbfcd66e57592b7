use thiserror::Error;

/// Errors raised by the calculators, codecs and the experiment runner.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid probability {value} for `{name}`: must lie in [0, 1]")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("alphabet mismatch: {left} vs {right} symbols")]
    AlphabetMismatch { left: usize, right: usize },

    #[error("invalid distortion {value}: {reason}")]
    InvalidDistortion { value: f64, reason: String },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("mode mismatch: {0}")]
    ModeMismatch(String),

    #[error("{what} of {requested} exceeds the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        requested: f64,
        cap: u64,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("root finder failed to bracket a sign change on [{lo}, {hi}]")]
    BracketFailure { lo: f64, hi: f64 },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn param(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
