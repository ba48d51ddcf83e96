use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("length {len} is not a power of two")]
    InvalidLength { len: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("element {index} is not a binary symbol")]
    InvalidBit { index: usize },

    #[error("LLR at position {index} is not finite")]
    NonFiniteLlr { index: usize },

    #[error("noise variance must be positive and finite, got {0}")]
    InvalidVariance(f64),

    #[error("mean at position {index} is negative or NaN ({value})")]
    InvalidMean { index: usize, value: f64 },

    #[error("information set index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("information set contains duplicate index {index}")]
    DuplicateIndex { index: usize },

    #[error("cannot select {k} information channels out of {available}")]
    InfoSetSize { k: usize, available: usize },

    #[error("invalid code dimensions: K={k}, N={n}, M={m}")]
    InvalidDimensions { k: usize, n: usize, m: usize },

    #[error("maximum number of transmissions must be at least 1")]
    InvalidMaxTransmissions,

    #[error("design search range is empty: K={k}, floor(Q/T)={upper}")]
    InfeasibleSearch { k: usize, upper: usize },

    #[error("per-round error probability vector is empty")]
    EmptyErrorProfile,

    #[error("error probability {0} is outside [0, 1]")]
    InvalidProbability(f64),

    #[error("root bracketing failed for target capacity {0}")]
    BracketFailure(f64),

    #[error("session already finished")]
    SessionFinished,
}
