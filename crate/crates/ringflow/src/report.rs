//! Pass/fail reports shared by all verification routines.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Outcome of one numerical check.
///
/// `pass` holds exactly when a violation was measured and it does not exceed
/// `tolerance`. Checks whose hypotheses are not met carry `applicable = false`;
/// they may still report a measured violation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub pass: bool,
    pub applicable: bool,
    pub worst_violation: Option<f64>,
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rigidity: Option<bool>,
    #[serde(default)]
    pub diagnostics: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sample_columns: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub samples: Vec<Vec<f64>>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, worst_violation: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            pass: worst_violation <= tolerance,
            applicable: true,
            worst_violation: Some(worst_violation),
            tolerance,
            rigidity: None,
            diagnostics: BTreeMap::new(),
            notes: Vec::new(),
            sample_columns: Vec::new(),
            samples: Vec::new(),
        }
    }

    /// A check that could not be evaluated at all.
    pub fn not_applicable(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            pass: false,
            applicable: false,
            worst_violation: None,
            tolerance: 0.0,
            rigidity: None,
            diagnostics: BTreeMap::new(),
            notes: vec![reason.into()],
            sample_columns: Vec::new(),
            samples: Vec::new(),
        }
    }

    pub fn with_diag(mut self, key: &str, value: f64) -> Self {
        self.diag(key, value);
        self
    }

    /// Record a named diagnostic. Non-finite values are stored as notes so the
    /// report stays valid JSON.
    pub fn diag(&mut self, key: &str, value: f64) {
        if value.is_finite() {
            self.diagnostics.insert(key.to_string(), value);
        } else {
            self.notes.push(format!("{key} = {value}"));
        }
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// Mark the hypotheses of the underlying statement as unmet.
    pub fn inapplicable_because(mut self, reason: impl Into<String>) -> Self {
        self.applicable = false;
        self.notes.push(reason.into());
        self
    }

    /// Whether this report counts as a failure for aggregate exit codes.
    pub fn is_failure(&self) -> bool {
        self.applicable && !self.pass
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_iff_within_tolerance() {
        assert!(CheckReport::new("a", 1e-9, 1e-8).pass);
        assert!(!CheckReport::new("a", 1e-7, 1e-8).pass);
        let na = CheckReport::not_applicable("b", "no curve");
        assert!(!na.pass && !na.is_failure());
    }

    #[test]
    fn json_round_trip_with_nonfinite_diag() {
        let mut r = CheckReport::new("c", 0.0, 1.0);
        r.diag("x", f64::INFINITY);
        r.diag("y", 2.5);
        let s = serde_json::to_string(&r).unwrap();
        let back: CheckReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }
}
