use thiserror::Error;

/// Errors raised by the arithmetic routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("valuation of zero is undefined")]
    ZeroValuation,
    #[error("no square root: {0}")]
    NoSquareRoot(String),
    #[error("2-adic precision exhausted")]
    PrecisionExhausted,
    #[error("not congruent to 1 modulo the maximal ideal")]
    NotPrincipalUnit,
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    /// A computed quantity contradicts a proven structural fact.
    #[error("consistency check failed: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
