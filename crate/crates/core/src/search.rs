//! Enumeration budget shared by the exhaustive searches.
//!
//! Exceeding the budget is an error, never a silent truncation.

use std::cell::Cell;

use crate::error::{Error, Result};

/// Environment variable read by [`Budget::from_env`].
pub const MAX_SEARCH_ENV: &str = "MCT_MAX_SEARCH";

/// Counter of enumeration steps with a hard cap.
#[derive(Debug)]
pub struct Budget {
    limit: u64,
    used: Cell<u64>,
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget { limit, used: Cell::new(0) }
    }

    pub fn unlimited() -> Self {
        Budget::new(u64::MAX)
    }

    /// Reads `MCT_MAX_SEARCH`; unset means unlimited, garbage is an input error.
    pub fn from_env() -> Result<Self> {
        match std::env::var(MAX_SEARCH_ENV) {
            Ok(v) => v
                .trim()
                .parse::<u64>()
                .map(Budget::new)
                .map_err(|_| Error::Input(format!("{MAX_SEARCH_ENV}={v:?} is not a non-negative integer"))),
            Err(_) => Ok(Budget::unlimited()),
        }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn used(&self) -> u64 {
        self.used.get()
    }

    /// Charges `n` steps against the budget for the search named `what`.
    pub fn charge(&self, what: &'static str, n: u64) -> Result<()> {
        let used = self.used.get().saturating_add(n);
        self.used.set(used);
        if used > self.limit {
            Err(Error::SearchLimit { what, limit: self.limit })
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::unlimited()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cap_is_fatal() {
        let b = Budget::new(3);
        assert!(b.charge("x", 3).is_ok());
        assert!(matches!(b.charge("x", 1), Err(Error::SearchLimit { limit: 3, .. })));
    }
}
