//! Pass/fail records shared by every verification routine.

use serde::{Deserialize, Serialize};

/// One verified identity, bound or property.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub tag: String,
    pub lambda: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<i64>,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    pub pass: bool,
}

impl Check {
    /// Passes iff `residual <= tol` (NaN fails).
    pub fn residual(tag: impl Into<String>, lambda: Option<u32>, residual: f64, tol: f64) -> Self {
        Self {
            tag: tag.into(),
            lambda,
            m: None,
            value: residual,
            bound: Some(tol),
            residual: Some(residual),
            pass: residual <= tol,
        }
    }

    /// Passes iff `value < bound`.
    pub fn below(tag: impl Into<String>, lambda: Option<u32>, value: f64, bound: f64) -> Self {
        Self {
            tag: tag.into(),
            lambda,
            m: None,
            value,
            bound: Some(bound),
            residual: None,
            pass: value < bound,
        }
    }

    /// Passes iff `value >= bound`.
    pub fn at_least(tag: impl Into<String>, lambda: Option<u32>, value: f64, bound: f64) -> Self {
        Self {
            tag: tag.into(),
            lambda,
            m: None,
            value,
            bound: Some(bound),
            residual: None,
            pass: value >= bound,
        }
    }

    /// A boolean property; `value` carries a diagnostic number (slack, gap, count).
    pub fn flag(tag: impl Into<String>, lambda: Option<u32>, pass: bool, value: f64) -> Self {
        Self {
            tag: tag.into(),
            lambda,
            m: None,
            value,
            bound: None,
            residual: None,
            pass: pass && !value.is_nan(),
        }
    }

    pub fn with_m(mut self, m: i64) -> Self {
        self.m = Some(m);
        self
    }
}

/// An ordered list of checks.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
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

    pub fn passed(&self) -> usize {
        self.checks.iter().filter(|c| c.pass).count()
    }

    pub fn failed(&self) -> usize {
        self.checks.len() - self.passed()
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.pass)
    }

    pub fn get(&self, tag: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.tag == tag)
    }

    pub fn with_tag<'a>(&'a self, tag: &'a str) -> impl Iterator<Item = &'a Check> + 'a {
        self.checks.iter().filter(move |c| c.tag == tag)
    }

    /// Largest recorded residual, ignoring checks without one.
    pub fn max_residual(&self) -> f64 {
        self.checks.iter().filter_map(|c| c.residual).fold(0.0, f64::max)
    }
}

impl FromIterator<Check> for Report {
    fn from_iter<T: IntoIterator<Item = Check>>(iter: T) -> Self {
        Self {
            checks: iter.into_iter().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_never_passes() {
        assert!(!Check::residual("r", None, f64::NAN, 1.0).pass);
        assert!(!Check::below("b", None, f64::NAN, 1.0).pass);
        assert!(!Check::at_least("a", None, f64::NAN, 0.0).pass);
        assert!(!Check::flag("f", None, true, f64::NAN).pass);
    }

    #[test]
    fn optional_fields_are_omitted() {
        let json = serde_json::to_string(&Check::flag("f", Some(2), true, 0.5)).unwrap();
        assert_eq!(json, r#"{"tag":"f","lambda":2,"value":0.5,"pass":true}"#);
        let back: Check = serde_json::from_str(&json).unwrap();
        assert_eq!(back.m, None);
    }
}
