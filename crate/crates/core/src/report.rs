//! Pass/fail reports with machine-readable witnesses.

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn pass(&mut self, name: &str, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), passed: true, detail: detail.into(), witness: None });
    }

    pub fn fail(&mut self, name: &str, detail: impl Into<String>, witness: Value) {
        self.checks.push(Check {
            name: name.into(),
            passed: false,
            detail: detail.into(),
            witness: Some(witness),
        });
    }

    /// Records a check from an optional failure witness.
    pub fn record(&mut self, name: &str, detail: impl Into<String>, failure: Option<Value>) {
        match failure {
            None => self.pass(name, detail),
            Some(w) => self.fail(name, detail, w),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }
}
