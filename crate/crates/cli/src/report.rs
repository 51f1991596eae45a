use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Acceptance rule a measured value is judged against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Bound {
    Below { limit: f64 },
    AtMost { limit: f64 },
    Above { limit: f64 },
    AtLeast { limit: f64 },
    Within { target: f64, tolerance: f64 },
    Between { lo: f64, hi: f64 },
    /// Boolean property; measured is 1 when it holds.
    Holds,
}

impl Bound {
    pub fn admits(&self, x: f64) -> bool {
        match *self {
            Bound::Below { limit } => x < limit,
            Bound::AtMost { limit } => x <= limit,
            Bound::Above { limit } => x > limit,
            Bound::AtLeast { limit } => x >= limit,
            Bound::Within { target, tolerance } => (x - target).abs() <= tolerance,
            Bound::Between { lo, hi } => x >= lo && x <= hi,
            Bound::Holds => x == 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// `null` in JSON when the measurement was not finite.
    pub measured: f64,
    #[serde(flatten)]
    pub bound: Bound,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, measured: f64, bound: Bound) -> Self {
        Check { name: name.into(), measured, passed: measured.is_finite() && bound.admits(measured), bound }
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Check::new(name, if ok { 1.0 } else { 0.0 }, Bound::Holds)
    }
}

/// Wall-clock facts, kept apart so reruns compare equal without them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTiming {
    pub started_unix_seconds: u64,
    pub wall_seconds: f64,
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: String,
    pub master_seed: u64,
    /// Model components exercised by the run's stages.
    pub model_tags: Vec<String>,
    pub config: Value,
    pub measurements: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    pub artifacts: Vec<String>,
    pub all_passed: bool,
    pub timing: Option<RunTiming>,
}

impl RunReport {
    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Report JSON with the timing block removed.
    pub fn deterministic_json(&self) -> serde_json::Result<String> {
        let mut r = self.clone();
        r.timing = None;
        serde_json::to_string_pretty(&r)
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(dir.join("report.json"), text + "\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds() {
        assert!(Bound::Below { limit: 1.0 }.admits(0.5));
        assert!(!Bound::Below { limit: 1.0 }.admits(1.0));
        assert!(Bound::AtMost { limit: 1.0 }.admits(1.0));
        assert!(Bound::Within { target: 0.5, tolerance: 0.1 }.admits(0.58));
        assert!(!Bound::Between { lo: 0.485, hi: 0.515 }.admits(0.52));
        assert!(!Check::new("nan", f64::NAN, Bound::Above { limit: 0.0 }).passed);
        assert!(Check::holds("ok", true).passed);
    }

    #[test]
    fn check_json_is_flat() {
        let c = Check::new("l2", 2e-5, Bound::Below { limit: 1e-4 });
        let v = serde_json::to_value(&c).unwrap();
        assert_eq!(v["rule"], "below");
        assert_eq!(v["limit"], 1e-4);
        assert_eq!(v["passed"], true);
        let back: Check = serde_json::from_value(v).unwrap();
        assert_eq!(back, c);
    }
}
