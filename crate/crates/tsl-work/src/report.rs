//! Verification reports: named checks with measured deviations, declared
//! tolerances, pass/fail verdicts, and a JSON rendering for machines.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable scaling every comparison tolerance (default 1).
pub const TOL_SCALE_ENV: &str = "TSLWORK_TOL_SCALE";

/// Read the tolerance scale from the environment.
pub fn tolerance_scale_from_env() -> Result<f64> {
    match std::env::var(TOL_SCALE_ENV) {
        Err(std::env::VarError::NotPresent) => Ok(1.0),
        Err(std::env::VarError::NotUnicode(_)) => Err(Error::Config(format!(
            "{TOL_SCALE_ENV} is not valid unicode"
        ))),
        Ok(text) => {
            let v: f64 = text.parse().map_err(|_| {
                Error::Config(format!("{TOL_SCALE_ENV} must be a number, got '{text}'"))
            })?;
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Config(format!(
                    "{TOL_SCALE_ENV} must be finite and > 0, got {v}"
                )));
            }
            Ok(v)
        }
    }
}

/// One named check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Largest measured deviation (definition depends on the check).
    pub max_deviation: f64,
    /// Tolerance the deviation was compared against (already scaled).
    pub tolerance: f64,
    /// Trajectory time at which the worst deviation occurred, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_time: Option<f64>,
    /// Free-form context (sample counts, sub-quantity, …).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckResult {
    /// Verdict from a measured maximum against a tolerance.
    pub fn from_max(
        name: impl Into<String>,
        max_deviation: f64,
        tolerance: f64,
        worst_time: Option<f64>,
    ) -> Self {
        Self {
            name: name.into(),
            passed: max_deviation <= tolerance,
            max_deviation,
            tolerance,
            worst_time,
            detail: None,
        }
    }

    /// Attach context.
    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    /// One human-readable line.
    pub fn summary_line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let mut line = format!(
            "{verdict}  {:<28} max deviation {:>12.4e}  tolerance {:>10.3e}",
            self.name, self.max_deviation, self.tolerance
        );
        if let Some(t) = self.worst_time {
            line.push_str(&format!("  (worst at t = {t:.4})"));
        }
        if let Some(d) = &self.detail {
            line.push_str(&format!("  [{d}]"));
        }
        line
    }
}

/// Run parameters recorded alongside the checks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunMetadata {
    pub scenario: String,
    pub drive_label: String,
    pub t0: f64,
    pub t1: f64,
    pub dt: f64,
    pub beta: f64,
    pub gamma0: f64,
    pub absorption_scale: f64,
    /// Tolerance multiplier in effect (from [`TOL_SCALE_ENV`]).
    pub tol_scale: f64,
    pub version: String,
}

/// Aggregate verdict over a set of named checks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub metadata: RunMetadata,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn new(metadata: RunMetadata) -> Self {
        Self {
            metadata,
            passed: true,
            checks: Vec::new(),
        }
    }

    /// Record a check and fold it into the aggregate verdict.
    pub fn push(&mut self, check: CheckResult) {
        self.passed &= check.passed;
        self.checks.push(check);
    }

    /// Look up a check by name.
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Pretty JSON document.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Write the JSON document to a file.
    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    /// Human-readable summary, one line per check plus a verdict.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "scenario {} (drive {}, dt = {}, tol scale {})\n",
            self.metadata.scenario,
            self.metadata.drive_label,
            self.metadata.dt,
            self.metadata.tol_scale
        ));
        for check in &self.checks {
            out.push_str(&check.summary_line());
            out.push('\n');
        }
        out.push_str(if self.passed {
            "verdict: PASS\n"
        } else {
            "verdict: FAIL\n"
        });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn metadata() -> RunMetadata {
        RunMetadata {
            scenario: "test".into(),
            drive_label: "fig1a".into(),
            t0: 0.0,
            t1: 4.0,
            dt: 1e-3,
            beta: 1.0,
            gamma0: 1.0,
            absorption_scale: 1.0,
            tol_scale: 1.0,
            version: "0.1.0".into(),
        }
    }

    #[test]
    fn verdict_aggregates_over_checks() {
        let mut report = VerificationReport::new(metadata());
        report.push(CheckResult::from_max("a", 1e-12, 1e-9, None));
        assert!(report.passed);
        report.push(CheckResult::from_max("b", 2e-9, 1e-9, Some(1.25)));
        assert!(!report.passed);
        assert!(report.check("b").is_some());
        assert!(report.check("missing").is_none());

        // Boundary is inclusive.
        let boundary = CheckResult::from_max("c", 1e-9, 1e-9, None);
        assert!(boundary.passed);
    }

    #[test]
    fn json_rendering_round_trips() {
        let mut report = VerificationReport::new(metadata());
        report.push(
            CheckResult::from_max("detailed-balance", 0.0, 1e-10, None)
                .with_detail("2 frequencies"),
        );
        let text = report.to_json().unwrap();
        assert!(text.contains("\"detailed-balance\""));
        assert!(text.contains("\"passed\": true"));
        let back: VerificationReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back.checks.len(), 1);
        assert!(back.passed);
    }

    #[test]
    fn summary_marks_failures() {
        let mut report = VerificationReport::new(metadata());
        report.push(CheckResult::from_max("ok-check", 0.0, 1e-9, None));
        report.push(CheckResult::from_max("bad-check", 1.0, 1e-9, Some(0.5)));
        let text = report.summary();
        assert!(text.contains("PASS  ok-check"));
        assert!(text.contains("FAIL  bad-check"));
        assert!(text.contains("verdict: FAIL"));
    }

    #[test]
    fn tolerance_scale_parses_and_rejects() {
        // The environment of the test runner should not normally define the
        // variable; exercise the parser through explicit env manipulation.
        std::env::remove_var(TOL_SCALE_ENV);
        assert_eq!(tolerance_scale_from_env().unwrap(), 1.0);
        std::env::set_var(TOL_SCALE_ENV, "2.5");
        assert_eq!(tolerance_scale_from_env().unwrap(), 2.5);
        std::env::set_var(TOL_SCALE_ENV, "zero");
        assert!(tolerance_scale_from_env().is_err());
        std::env::set_var(TOL_SCALE_ENV, "-1");
        assert!(tolerance_scale_from_env().is_err());
        std::env::remove_var(TOL_SCALE_ENV);
    }
}
