use thiserror::Error;

use crate::weil::WeilFailure;

/// Errors raised by the library. Every public operation is a pure function,
/// so an error always describes a problem with the inputs (or a configured
/// effort bound), never a transient condition.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("the valuation of zero is infinite")]
    ZeroValuation,

    #[error("factoring {n} exceeded the effort bound of {bound} rho iterations")]
    FactorizationTimeout { n: String, bound: u64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("inconsistent point counts: {0}")]
    InconsistentCounts(String),

    #[error("not a Weil polynomial: {0}")]
    NotWeil(WeilFailure),

    #[error("twist {twist} meets an algebraic-cycle eigenvalue (P(q^-{twist}) = 0); this cell is on the Chow diagonal")]
    OnDiagonalTwist { twist: u32 },

    #[error("degree {d} is divisible by the characteristic {p}")]
    UnsupportedDegree { d: u32, p: u64 },

    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("descriptor not eligible: {0}")]
    Ineligible(String),
}

impl Error {
    /// True for errors caused by a configured effort bound rather than bad input.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::BudgetExceeded(_) | Error::FactorizationTimeout { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
