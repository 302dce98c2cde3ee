use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("inconsistent sign pair: sign*(x) = -1 and sign*(-x) = -1 has no real solution")]
    InconsistentPair,

    #[error("dynamic range is undefined for the zero signal")]
    ZeroSignal,

    #[error("index {index} is outside [1, {dim}]")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("duplicate index {0}")]
    DuplicateIndex(usize),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("construction failed after {attempts} attempts")]
    ConstructionFailed { attempts: usize },

    #[error("instance too large: {count} candidates exceed the cap of {cap}")]
    InstanceTooLarge { count: u128, cap: u128 },

    #[error("design columns do not share a uniform weight")]
    NonuniformWeight,

    #[error("power-row base must be positive, got {0}")]
    InvalidBase(String),

    #[error("power-row value needs about {bits} bits, above the cap of {cap}")]
    ExponentTooLarge { bits: u64, cap: u64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("regime mismatch: expected {expected}, found {found}")]
    RegimeMismatch { expected: String, found: String },

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("decoding failed: no candidate is consistent with the measurements")]
    DecodingFailed,

    #[error("resampling cap of {0} exceeded")]
    ResampleCapExceeded(usize),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("trial {trial}: {source}")]
    Trial {
        trial: u64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
