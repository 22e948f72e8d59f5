use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Exhaustive work over S_n was requested for an `n` above the configured cap.
    #[error("n = {n} exceeds the enumeration cap of {cap}")]
    EnumerationCap { n: usize, cap: usize },

    #[error("measures live on different groups (S_{left} vs S_{right})")]
    SizeMismatch { left: usize, right: usize },

    #[error("expected a probability measure: {0}")]
    NotProbability(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A hypothesis of a theorem-level check does not hold for the given parameters.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("lattice enumeration needs about {needed} nodes, budget is {budget}")]
    Budget { needed: u128, budget: u128 },

    #[error("series truncation too small: {0}")]
    Truncation(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors that stem from a size or budget limit rather than bad input.
    pub fn is_cap_violation(&self) -> bool {
        matches!(
            self,
            Error::EnumerationCap { .. } | Error::Budget { .. } | Error::Truncation(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
