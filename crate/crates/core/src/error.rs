use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("negative probability {value} at entry {index}")]
    NegativeProbability { index: usize, value: f64 },

    #[error("probabilities sum to {sum}, not 1")]
    NotNormalized { sum: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("probability {0} outside [0, 0.5]")]
    ProbabilityOutOfRange(f64),

    #[error("empty support")]
    EmptySupport,

    #[error("invalid coordinate selection: {0}")]
    InvalidCoordinate(String),

    #[error("conditional probability undefined: P(y) = 0 at position {position}")]
    UndefinedConditional { position: usize },

    #[error("distributions have different supports ({0} vs {1})")]
    SupportMismatch(usize, usize),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("enumeration regime too large: {0}")]
    RegimeTooLarge(String),

    #[error("infeasible key length: bound evaluates to {bound:.3} bits (t = {t})")]
    InfeasibleKeyLength { bound: f64, t: u32 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("message of {message_bits} bits exceeds {key_bits}-bit one-time pad")]
    KeyTooShort {
        key_bits: usize,
        message_bits: usize,
    },

    #[error("stream scheme needs a 256-bit key, got {0} bits")]
    BadKeyLength(usize),

    #[error("parameter digest mismatch")]
    DigestMismatch,

    #[error("adversary exceeded its budget of {budget} oracle queries")]
    QueryBudgetExceeded { budget: usize },

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
