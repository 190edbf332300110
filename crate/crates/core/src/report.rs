//! Violation reports shared by the identity validators and the (di)derivation
//! checkers.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::Scalar;

/// Checkers on operators keep at most this many witnesses.
pub const WITNESS_LIMIT: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub identity: String,
    /// Basis indices of the failing pair or triple.
    pub indices: Vec<usize>,
    pub labels: Vec<String>,
    /// Nonzero coordinates of `lhs - rhs`.
    pub discrepancy: Vec<Entry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry(pub usize, #[serde(with = "crate::arith::serde_scalar")] pub Scalar);

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub checked: usize,
    pub total_violations: usize,
    pub violations: Vec<Violation>,
}

impl Report {
    pub fn is_pass(&self) -> bool {
        self.total_violations == 0
    }

    /// Collects violations in the given (already deterministic) order,
    /// keeping at most `limit` witnesses when a limit is set.
    pub(crate) fn collect<I>(checked: usize, found: I, limit: Option<usize>) -> Report
    where
        I: IntoIterator<Item = Violation>,
    {
        let mut report = Report {
            checked,
            ..Report::default()
        };
        for v in found {
            report.total_violations += 1;
            if limit.is_none_or(|l| report.violations.len() < l) {
                report.violations.push(v);
            }
        }
        report
    }

    pub fn merge(mut self, other: Report, limit: Option<usize>) -> Report {
        self.checked += other.checked;
        self.total_violations += other.total_violations;
        for v in other.violations {
            if limit.is_none_or(|l| self.violations.len() < l) {
                self.violations.push(v);
            }
        }
        self
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_pass() {
            return write!(f, "pass ({} checks)", self.checked);
        }
        writeln!(
            f,
            "FAIL: {} of {} checks violated",
            self.total_violations, self.checked
        )?;
        for v in &self.violations {
            let disc: Vec<String> = v
                .discrepancy
                .iter()
                .map(|Entry(i, c)| format!("[{i}]={c}"))
                .collect();
            writeln!(
                f,
                "  {} at ({}): {}",
                v.identity,
                v.labels.join(", "),
                disc.join(" ")
            )?;
        }
        Ok(())
    }
}
