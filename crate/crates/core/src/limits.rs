use crate::error::{Error, Result};

/// Size limits for exhaustive computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest `n` for which S_n is enumerated element by element.
    pub enumeration_cap: usize,
    /// Largest number of search nodes spent on one lattice-vector count.
    pub vector_budget: u128,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            enumeration_cap: 10,
            vector_budget: 50_000_000,
        }
    }
}

impl Limits {
    pub fn with_enumeration_cap(cap: usize) -> Self {
        Limits {
            enumeration_cap: cap,
            ..Limits::default()
        }
    }

    pub fn check_enumeration(&self, n: usize) -> Result<()> {
        if n > self.enumeration_cap {
            Err(Error::EnumerationCap {
                n,
                cap: self.enumeration_cap,
            })
        } else {
            Ok(())
        }
    }
}
