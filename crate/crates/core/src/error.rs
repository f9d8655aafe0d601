use thiserror::Error;

/// Errors raised by the library.
///
/// [`Error::is_resource`] separates cost and overflow guards from input
/// validation; the CLI maps the two classes onto distinct exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("non-finite coordinate {0}")]
    NonFinite(f64),

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("invalid observable: {0}")]
    InvalidObservable(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("frequency overflow composing with T^{n}")]
    FrequencyOverflow { n: i64 },

    #[error("integer overflow in matrix arithmetic")]
    MatrixOverflow,

    #[error("integer overflow adding frequencies")]
    FrequencySumOverflow,

    #[error("term count {terms} exceeds cap {cap}")]
    TermCap { terms: usize, cap: usize },

    #[error("cost guard: {0}")]
    CostGuard(String),

    #[error("maps do not commute (discrepancy {0:e})")]
    NotCommuting(f64),

    #[error("insufficient checkpoints in tail window: {found} < 3")]
    InsufficientCheckpoints { found: usize },
}

impl Error {
    /// Overflow and cost-cap errors, as opposed to malformed input.
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            Error::FrequencyOverflow { .. }
                | Error::MatrixOverflow
                | Error::FrequencySumOverflow
                | Error::TermCap { .. }
                | Error::CostGuard(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
