//! Verification reports: named checks with pass/fail/inconclusive status,
//! plus optional tables of exact data.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

/// One verified statement.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    /// Human-readable detail; for failures, a witness.
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            status: if pass { Status::Pass } else { Status::Fail },
            detail: detail.into(),
        }
    }

    pub fn pass(name: impl Into<String>) -> Self {
        Check::new(name, true, "")
    }

    pub fn inconclusive(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Check { name: name.into(), status: Status::Inconclusive, detail: detail.into() }
    }

    /// Pass when `failures` is empty; otherwise fail with the first few witnesses.
    pub fn from_failures(name: impl Into<String>, total: usize, failures: &[String]) -> Self {
        if failures.is_empty() {
            Check::new(name, true, format!("{total} instances"))
        } else {
            let shown: Vec<&str> = failures.iter().take(3).map(String::as_str).collect();
            Check::new(name, false, format!("{} of {total} failed; first: {}", failures.len(), shown.join("; ")))
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Tabular exact data attached to a report (eigenvalue series and the like).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Result of one verification routine.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub name: String,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub tables: Vec<Table>,
}

impl Report {
    pub fn new(name: impl Into<String>) -> Self {
        Report { name: name.into(), checks: Vec::new(), tables: Vec::new() }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, other: Report) {
        let prefix = other.name;
        for mut c in other.checks {
            c.name = format!("{prefix}/{}", c.name);
            self.checks.push(c);
        }
        self.tables.extend(other.tables);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed()).collect()
    }
}
