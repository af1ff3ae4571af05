use thiserror::Error;

/// Everything that can go wrong in the toolkit.
///
/// Each variant maps to a stable machine-readable code (see [`Error::code`])
/// that the CLI prints on failure and the C ABI returns as an integer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("segment ({lo}, {hi}] holds {len} integers, above the budget of {budget}")]
    SegmentTooLarge { lo: u64, hi: u64, len: u64, budget: u64 },

    #[error("y = {y} exceeds the prime table cap {cap}")]
    PrimeCapExceeded { y: u64, cap: u64 },

    #[error("support of g_y has 2^{odd_primes} entries; at most 2^{cap} can be enumerated")]
    SupportTooLarge { odd_primes: usize, cap: usize },

    #[error("{0} is not squarefree")]
    NotSquarefree(u64),

    #[error("modulus {q} exceeds the cap {cap}")]
    ModulusTooLarge { q: u64, cap: u64 },

    #[error("memoization budget of {0} entries exceeded")]
    BudgetExceeded(usize),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("pole: {0}")]
    Pole(String),

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("parameters violate the admissible range: {0}")]
    RangeViolated(String),

    #[error("contour truncation insufficient: tail bound {bound:e} exceeds tolerance {tolerance:e}")]
    TruncationInsufficient { bound: f64, tolerance: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable identifier printed by the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::SegmentTooLarge { .. } => "E_SEGMENT_TOO_LARGE",
            Error::PrimeCapExceeded { .. } => "E_PRIME_CAP",
            Error::SupportTooLarge { .. } => "E_SUPPORT_TOO_LARGE",
            Error::NotSquarefree(_) => "E_NOT_SQUAREFREE",
            Error::ModulusTooLarge { .. } => "E_MODULUS_TOO_LARGE",
            Error::BudgetExceeded(_) => "E_BUDGET_EXCEEDED",
            Error::OutOfRange(_) => "E_OUT_OF_RANGE",
            Error::Pole(_) => "E_POLE",
            Error::UnsupportedRegime(_) => "E_UNSUPPORTED_REGIME",
            Error::RangeViolated(_) => "E_RANGE_VIOLATED",
            Error::TruncationInsufficient { .. } => "E_TRUNCATION",
            Error::InvalidInput(_) => "E_INVALID_INPUT",
        }
    }

    /// Numeric form of [`Error::code`]; also the CLI exit status.
    pub fn numeric_code(&self) -> i32 {
        match self {
            Error::SegmentTooLarge { .. } => 10,
            Error::PrimeCapExceeded { .. } => 11,
            Error::SupportTooLarge { .. } => 12,
            Error::NotSquarefree(_) => 13,
            Error::ModulusTooLarge { .. } => 14,
            Error::BudgetExceeded(_) => 15,
            Error::OutOfRange(_) => 16,
            Error::Pole(_) => 17,
            Error::UnsupportedRegime(_) => 18,
            Error::RangeViolated(_) => 19,
            Error::TruncationInsufficient { .. } => 20,
            Error::InvalidInput(_) => 21,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
