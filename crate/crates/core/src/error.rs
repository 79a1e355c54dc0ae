use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RoeError {
    #[error("h_{n}({j}) is not an integer: b does not divide a*j*(j-1)")]
    NonIntegralH { n: usize, j: String },

    #[error("coefficient {which}_{n}({j}) is not a positive integer")]
    NonPositiveCoefficient { which: char, n: usize, j: String },

    #[error("integer of {bits} bits exceeds the bit budget of {budget}")]
    BitSizeExceeded { bits: u64, budget: u64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid digits: {0}")]
    InvalidDigits(String),

    #[error("monotonicity of h in j has not been verified for system `{0}`")]
    MonotonicityUnverified(String),

    #[error("hypothesis unverified: {0}")]
    HypothesisUnverified(String),

    #[error("drawn symbol exceeds the support cap of {cap}")]
    SupportOverflow { cap: u64 },

    #[error("sequence of length {len} is shorter than the required {required}")]
    LengthMismatch { len: usize, required: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T, E = RoeError> = std::result::Result<T, E>;

impl RoeError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        RoeError::Domain(msg.into())
    }
}
