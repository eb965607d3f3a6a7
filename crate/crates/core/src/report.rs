//! Check results shared by every verification routine.

use serde::Serialize;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// The check does not apply to this input.
    Skipped { reason: String },
    /// A reported property that is never a failure (e.g. distributivity).
    Info,
}

/// One named verdict with its supporting evidence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    #[serde(flatten)]
    pub status: Status,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, status: Status) -> Self {
        Check {
            name: name.into(),
            status,
            witnesses: Vec::new(),
            gap: None,
            tolerance: None,
            detail: None,
        }
    }

    pub fn pass(name: impl Into<String>) -> Self {
        Self::new(name, Status::Pass)
    }

    pub fn fail(name: impl Into<String>) -> Self {
        Self::new(name, Status::Fail)
    }

    /// Pass when `witnesses` is empty, fail otherwise.
    pub fn from_witnesses(name: impl Into<String>, witnesses: Vec<String>) -> Self {
        let status = if witnesses.is_empty() { Status::Pass } else { Status::Fail };
        Check { witnesses, ..Self::new(name, status) }
    }

    pub fn skipped(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Self::new(name, Status::Skipped { reason: reason.into() })
    }

    pub fn info(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Check { detail: Some(detail.into()), ..Self::new(name, Status::Info) }
    }

    pub fn with_gap(mut self, gap: f64) -> Self {
        self.gap = Some(gap);
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = Some(tolerance);
        self
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    pub fn with_witness(mut self, witness: impl Into<String>) -> Self {
        self.witnesses.push(witness.into());
        self
    }

    pub fn is_failure(&self) -> bool {
        self.status == Status::Fail
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match &self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped { .. } => "SKIP",
            Status::Info => "INFO",
        };
        write!(f, "[{tag}] {}", self.name)?;
        if let Status::Skipped { reason } = &self.status {
            write!(f, " ({reason})")?;
        }
        if let Some(detail) = &self.detail {
            write!(f, ": {detail}")?;
        }
        if let Some(gap) = self.gap {
            write!(f, " gap={gap:.3e}")?;
        }
        if let Some(tol) = self.tolerance {
            write!(f, " tol={tol:.1e}")?;
        }
        for w in self.witnesses.iter().take(10) {
            write!(f, "\n    witness: {w}")?;
        }
        if self.witnesses.len() > 10 {
            write!(f, "\n    ... {} more", self.witnesses.len() - 10)?;
        }
        Ok(())
    }
}

/// An ordered list of checks.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    /// True when no check failed. Skipped and informational entries do not count.
    pub fn passed(&self) -> bool {
        !self.checks.iter().any(Check::is_failure)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.is_failure())
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for check in &self.checks {
            writeln!(f, "{check}")?;
        }
        Ok(())
    }
}
