use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

/// Default node limit for exhaustive enumerations.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// A shared, thread-safe node counter for enumeration searches.
///
/// Every candidate examined by a backtracking or subset search spends one
/// node. Once the limit is hit the running operation aborts with
/// [`Error::BudgetExhausted`] instead of returning a silently truncated
/// answer.
#[derive(Debug)]
pub struct Budget {
    limit: u64,
    used: AtomicU64,
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget {
            limit,
            used: AtomicU64::new(0),
        }
    }

    /// Effectively unlimited; for small closed-form constructions.
    pub fn unlimited() -> Self {
        Budget::new(u64::MAX)
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn used(&self) -> u64 {
        self.used.load(Ordering::Relaxed)
    }

    /// Spend `n` nodes, failing once the running total passes the limit.
    pub fn spend(&self, n: u64) -> Result<()> {
        let prev = self.used.fetch_add(n, Ordering::Relaxed);
        if prev.saturating_add(n) > self.limit {
            Err(Error::BudgetExhausted { limit: self.limit })
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(DEFAULT_BUDGET)
    }
}
