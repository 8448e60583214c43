//! Counters shared by every exhaustive or sampled check.

use std::fmt;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub checked: u64,
    pub violations: u64,
    pub first_violation: Option<String>,
}

impl CheckReport {
    pub fn new() -> Self {
        Self::default()
    }

    /// Counts one instance; `describe` is only evaluated for the first failure.
    pub fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.violations += 1;
            if self.first_violation.is_none() {
                self.first_violation = Some(describe());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.checked += other.checked;
        self.violations += other.violations;
        if self.first_violation.is_none() {
            self.first_violation = other.first_violation;
        }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} checked, {} violations",
            self.checked, self.violations
        )?;
        if let Some(v) = &self.first_violation {
            write!(f, "; first: {v}")?;
        }
        Ok(())
    }
}
