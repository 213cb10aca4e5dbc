//! Error types shared across the crate.
//!
//! Three failure classes are kept distinct because callers react differently
//! to each: domain errors (bad arguments), resource exhaustion (a search hit
//! its configured budget and the answer is *unknown*, never "false"), and
//! internal inconsistencies (a computed state that a proven structural fact
//! rules out, which indicates a bug rather than a property of the input).

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// The input is outside the domain of the operation (non-squarefree d,
    /// d < 2, zero modulus, conductor with the wrong divisibility, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A bounded search or iteration exhausted its budget before reaching an
    /// answer. The budget that ran out is named; the result is indeterminate.
    #[error("budget exhausted: {0}")]
    BudgetExhausted(String),

    /// A computed state contradicts a structural fact that is supposed to
    /// hold unconditionally. Reaching this is a defect, not a data property.
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    /// Filesystem failure while reading or writing a survey log.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Shorthand used at argument-validation sites.
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Shorthand for budget-exhaustion sites.
    pub(crate) fn budget(msg: impl Into<String>) -> Self {
        Error::BudgetExhausted(msg.into())
    }
}
