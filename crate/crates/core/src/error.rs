use num_bigint::BigUint;
use thiserror::Error;

/// Crate-wide error type.
///
/// Incomplete factorizations are *data* in most places (see
/// [`crate::arith::FactorList`]); this variant only appears where an
/// operation demands a complete factorization to be meaningful.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the inputs was violated.
    #[error("domain error: {0}")]
    Domain(String),
    /// A configured resource budget (memory, iterations, candidates) ran out.
    #[error("budget exhausted: {0}")]
    Budget(String),
    /// The requested selection cannot be satisfied by any output.
    #[error("infeasible: {0}")]
    Feasibility(String),
    /// The input is outside the regime where the derived-parameter formulas
    /// are defined.
    #[error("parameter regime: {0}")]
    Regime(String),
    /// A complete factorization was required but the budget left a composite
    /// cofactor.
    #[error("incomplete factorization of {n}: composite cofactor {cofactor} remains")]
    IncompleteFactorization { n: BigUint, cofactor: BigUint },
    /// Internal invariants disagree; indicates corrupted input data.
    #[error("consistency violation: {0}")]
    Consistency(String),
    /// A mathematically guaranteed assertion failed; indicates a bug.
    #[error("correctness assertion failed: {0}")]
    Correctness(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable kind tag, used in error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Budget(_) => "budget",
            Error::Feasibility(_) => "feasibility",
            Error::Regime(_) => "regime",
            Error::IncompleteFactorization { .. } => "incomplete_factorization",
            Error::Consistency(_) => "consistency",
            Error::Correctness(_) => "correctness",
            Error::Io(_) => "io",
            Error::Parse(_) => "parse",
        }
    }

    /// Process exit code contract: 0 success, 2 usage/domain, 3
    /// feasibility/budget/regime, 4 consistency/correctness, 1 other.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Parse(_) => 2,
            Error::Budget(_)
            | Error::Feasibility(_)
            | Error::Regime(_)
            | Error::IncompleteFactorization { .. } => 3,
            Error::Consistency(_) | Error::Correctness(_) => 4,
            Error::Io(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
