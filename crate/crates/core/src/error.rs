use thiserror::Error;

/// Errors raised by the algebraic and stochastic routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A result would leave the stored grade window of a truncated module.
    #[error("truncation overflow: {0}")]
    TruncationOverflow(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Sugawara-type constructions are undefined at k = -h^\vee.
    #[error("critical level: {0}")]
    CriticalLevel(String),

    #[error("level {0} is not admissible (need k = -2 + p/q with p >= 2, gcd(p,q) = 1)")]
    NotAdmissible(String),

    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },

    /// Only reachable through an implementation bug: all simulated processes are polynomial.
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
