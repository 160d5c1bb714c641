use serde::{Deserialize, Serialize};

use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
    /// Nothing to compare against; not a failure.
    Skipped,
}

/// One named check with an optional witness or message.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn pass(name: impl Into<String>) -> Self {
        Check { name: name.into(), status: Status::Pass, detail: None }
    }

    pub fn fail(name: impl Into<String>, witness: impl Into<String>) -> Self {
        Check { name: name.into(), status: Status::Fail, detail: Some(witness.into()) }
    }

    pub fn error(name: impl Into<String>, message: impl Into<String>) -> Self {
        Check { name: name.into(), status: Status::Error, detail: Some(message.into()) }
    }

    pub fn skipped(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Check { name: name.into(), status: Status::Skipped, detail: Some(reason.into()) }
    }

    /// `Ok(None)` holds, `Ok(Some(w))` fails with witness `w`.
    pub fn from_outcome(name: impl Into<String>, outcome: Result<Option<String>>) -> Self {
        match outcome {
            Ok(None) => Check::pass(name),
            Ok(Some(w)) => Check::fail(name, w),
            Err(e) => Check::error(name, e.to_string()),
        }
    }

    pub fn is_ok(&self) -> bool {
        matches!(self.status, Status::Pass | Status::Skipped)
    }
}

/// Ordered list of checks; valid iff none failed or errored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn record(&mut self, name: &str, outcome: Result<Option<String>>) {
        self.push(Check::from_outcome(name, outcome));
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(Check::is_ok)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.is_ok())
    }
}
