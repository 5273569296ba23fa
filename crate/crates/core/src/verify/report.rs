//! Named pass/fail checks and the convergence table of a verified run.

use super::residuals::ConvergenceRow;
use serde::{Deserialize, Serialize};

/// Version of the report layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtMost,
    AtLeast,
    /// Reported only; always passes.
    Report,
}

/// One measured quantity against its limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measure {
    pub name: String,
    pub value: f64,
    pub limit: Option<f64>,
    pub relation: Relation,
    pub pass: bool,
}

impl Measure {
    pub fn at_most(name: &str, value: f64, limit: f64) -> Self {
        Self { name: name.into(), value, limit: Some(limit), relation: Relation::AtMost, pass: value <= limit }
    }

    pub fn at_least(name: &str, value: f64, limit: f64) -> Self {
        Self { name: name.into(), value, limit: Some(limit), relation: Relation::AtLeast, pass: value >= limit }
    }

    /// Strict positivity.
    pub fn positive(name: &str, value: f64) -> Self {
        Self { name: name.into(), value, limit: Some(0.0), relation: Relation::AtLeast, pass: value > 0.0 }
    }

    pub fn report(name: &str, value: f64) -> Self {
        Self { name: name.into(), value, limit: None, relation: Relation::Report, pass: true }
    }

    /// A check that could not be evaluated.
    pub fn failed(name: &str) -> Self {
        Self { name: name.into(), value: f64::NAN, limit: None, relation: Relation::Report, pass: false }
    }
}

/// A named check. `value` and `tolerance` are those of the first measure;
/// the check passes when every measure does.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    /// Number of the acceptance criterion this check implements, if any.
    pub criterion: Option<u8>,
    pub name: String,
    pub value: f64,
    pub tolerance: Option<f64>,
    pub pass: bool,
    /// Failing mandatory checks make the run fail.
    pub mandatory: bool,
    pub measures: Vec<Measure>,
    /// Why the check could not be evaluated, when it could not.
    pub error: Option<String>,
}

impl Check {
    pub fn new(criterion: Option<u8>, name: &str, mandatory: bool, measures: Vec<Measure>) -> Self {
        let (value, tolerance) = measures.first().map_or((f64::NAN, None), |m| (m.value, m.limit));
        let pass = !measures.is_empty() && measures.iter().all(|m| m.pass);
        Self { criterion, name: name.into(), value, tolerance, pass, mandatory, measures, error: None }
    }

    pub fn errored(criterion: Option<u8>, name: &str, mandatory: bool, error: impl ToString) -> Self {
        Self {
            criterion,
            name: name.into(),
            value: f64::NAN,
            tolerance: None,
            pass: false,
            mandatory,
            measures: Vec::new(),
            error: Some(error.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub thresholds_version: u32,
    pub checks: Vec<Check>,
    pub convergence: Vec<ConvergenceRow>,
}

impl VerificationReport {
    pub fn new(thresholds_version: u32) -> Self {
        Self { schema_version: SCHEMA_VERSION, thresholds_version, checks: Vec::new(), convergence: Vec::new() }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn criterion(&self, n: u8) -> Option<&Check> {
        self.checks.iter().find(|c| c.criterion == Some(n))
    }

    /// True when every mandatory check passes.
    pub fn passed(&self) -> bool {
        self.checks.iter().filter(|c| c.mandatory).all(|c| c.pass)
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| c.mandatory && !c.pass).map(|c| c.name.as_str()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_takes_first_measure_and_requires_all() {
        let c = Check::new(Some(7), "holder", true, vec![Measure::at_least("alpha", 0.5, 0.3), Measure::at_least("r2", 0.8, 0.9)]);
        assert_eq!((c.value, c.tolerance, c.pass), (0.5, Some(0.3), false));
        assert!(!Check::new(None, "empty", true, vec![]).pass);
        assert!(!Measure::at_most("nan", f64::NAN, 1.0).pass);
        assert!(!Measure::positive("zero", 0.0).pass);
    }

    #[test]
    fn only_mandatory_checks_gate_the_run() {
        let mut r = VerificationReport::new(1);
        r.push(Check::new(None, "diag", false, vec![Measure::at_most("x", 2.0, 1.0)]));
        assert!(r.passed());
        r.push(Check::errored(Some(1), "thermo", true, "boom"));
        assert!(!r.passed());
        assert_eq!(r.failed_checks(), vec!["thermo"]);
    }
}
