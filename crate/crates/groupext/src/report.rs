use serde::{Deserialize, Serialize};

/// Outcome of a single named check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// A search hit its node cap before deciding; not a pass and not a refutation.
    Unknown,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub status: CheckStatus,
    /// Human-readable witness for failures: the offending arrows, pair, or value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    /// Wall time of this check. Excluded from serialized output unless requested,
    /// so that reports for identical inputs are byte-identical.
    #[serde(skip)]
    pub wall_ms: u128,
}

impl CheckResult {
    pub fn pass(name: impl Into<String>) -> Self {
        CheckResult { name: name.into(), status: CheckStatus::Pass, witness: None, wall_ms: 0 }
    }

    pub fn fail(name: impl Into<String>, witness: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            status: CheckStatus::Fail,
            witness: Some(witness.into()),
            wall_ms: 0,
        }
    }

    pub fn unknown(name: impl Into<String>, witness: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            status: CheckStatus::Unknown,
            witness: Some(witness.into()),
            wall_ms: 0,
        }
    }
}

/// Report produced by the `validate_*` family: one entry per axiom or condition,
/// in a fixed order, each with a witness when violated.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub subject: String,
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn new(subject: impl Into<String>) -> Self {
        ValidationReport { subject: subject.into(), checks: Vec::new() }
    }

    pub fn push(&mut self, check: CheckResult) {
        self.checks.push(check);
    }

    /// Record `name` as passed if `witnesses` is empty, otherwise as failed with
    /// the first few witnesses joined into one message.
    pub fn check_all(&mut self, name: &str, witnesses: Vec<String>) {
        if witnesses.is_empty() {
            self.push(CheckResult::pass(name));
        } else {
            let shown = witnesses.iter().take(3).cloned().collect::<Vec<_>>().join("; ");
            let msg = if witnesses.len() > 3 {
                format!("{shown}; and {} more", witnesses.len() - 3)
            } else {
                shown
            };
            self.push(CheckResult::fail(name, msg));
        }
    }

    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.status == CheckStatus::Pass)
    }

    /// First failing check, if any.
    pub fn first_failure(&self) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.status != CheckStatus::Pass)
    }
}

/// Report produced by a verification suite: one entry per corpus item and law,
/// in canonical order regardless of execution schedule.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>) -> Self {
        VerificationReport { suite: suite.into(), checks: Vec::new() }
    }

    pub fn passed(&self) -> usize {
        self.checks.iter().filter(|c| c.status == CheckStatus::Pass).count()
    }

    pub fn failed(&self) -> usize {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail).count()
    }

    pub fn unknown(&self) -> usize {
        self.checks.iter().filter(|c| c.status == CheckStatus::Unknown).count()
    }

    pub fn all_passed(&self) -> bool {
        self.failed() == 0 && self.unknown() == 0 && !self.checks.is_empty()
    }

    /// Merge `other`'s checks into this report, keeping canonical (name) order.
    pub fn absorb(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
        self.checks.sort_by(|a, b| a.name.cmp(&b.name));
    }

    /// First check that did not pass, if any.
    pub fn first_failure(&self) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.status != CheckStatus::Pass)
    }
}
