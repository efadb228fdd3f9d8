use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

/// Default number of graph operations an enumeration may spend.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Environment variable overriding [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "STRATA_BUDGET";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("operation budget of {limit} graph operations exceeded")]
pub struct BudgetExceeded {
    pub limit: u64,
}

/// Instance-count budget shared by the workers of one computation.
#[derive(Debug)]
pub struct Budget {
    limit: u64,
    used: AtomicU64,
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Self {
            limit,
            used: AtomicU64::new(0),
        }
    }

    pub fn unlimited() -> Self {
        Self::new(u64::MAX)
    }

    /// Limit from `STRATA_BUDGET`, falling back to the default.
    pub fn limit_from_env() -> u64 {
        std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_BUDGET)
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn used(&self) -> u64 {
        self.used.load(Ordering::Relaxed)
    }

    pub fn charge(&self, ops: u64) -> Result<(), BudgetExceeded> {
        let before = self.used.fetch_add(ops, Ordering::Relaxed);
        if before.saturating_add(ops) > self.limit {
            Err(BudgetExceeded { limit: self.limit })
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Self::new(DEFAULT_BUDGET)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charges_until_exhausted() {
        let b = Budget::new(3);
        assert!(b.charge(2).is_ok());
        assert!(b.charge(1).is_ok());
        assert_eq!(b.charge(1), Err(BudgetExceeded { limit: 3 }));
    }
}
