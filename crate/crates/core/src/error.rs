use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("sequence length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("correlation needs at least 2 sequences, got {0}")]
    TooFewSequences(usize),

    #[error("correlation order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),

    #[error("correlation order {0} is outside 1..={max}", max = crate::seq::MAX_ORDER)]
    UnsupportedOrder(usize),

    #[error("enumeration of 2^{exponent} items exceeds the budget of {limit} items")]
    BudgetExceeded { exponent: u32, limit: u64 },

    #[error("invalid quantum numbers: {0}")]
    InvalidQuantumNumber(String),

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("degenerate priors: every allowed outcome has zero weight ({0})")]
    DegeneratePriors(String),

    #[error("parse error: {0}")]
    Parse(String),
}
