//! Audit results shared by the checking routines.

use serde::Serialize;

/// One verified property: the worst defect seen and the tolerance it was held to.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditCheck {
    pub name: String,
    pub worst_defect: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Where the worst defect occurred (time, sample index, ...), if meaningful.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl AuditCheck {
    pub fn new(name: impl Into<String>, worst_defect: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            worst_defect,
            tolerance,
            passed: worst_defect <= tolerance,
            witness: None,
        }
    }

    pub fn with_witness(mut self, witness: impl Into<String>) -> Self {
        self.witness = Some(witness.into());
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct AuditReport {
    pub checks: Vec<AuditCheck>,
}

impl AuditReport {
    pub fn push(&mut self, check: AuditCheck) {
        self.checks.push(check);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&AuditCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Running maximum that remembers where it was attained.
#[derive(Clone, Debug)]
pub(crate) struct Worst<W> {
    pub value: f64,
    pub at: Option<W>,
}

impl<W> Default for Worst<W> {
    fn default() -> Self {
        Self { value: 0.0, at: None }
    }
}

impl<W> Worst<W> {
    pub fn update(&mut self, value: f64, at: W) {
        if value > self.value || (value.is_nan() && !self.value.is_nan()) {
            self.value = value;
            self.at = Some(at);
        }
    }

    pub fn merge(self, other: Self) -> Self {
        if other.value > self.value || (other.value.is_nan() && !self.value.is_nan()) {
            other
        } else {
            self
        }
    }
}
