//! Suite reports and their CSV, JSON and text renderings.

use std::fmt::Write as _;

use serde::Serialize;

use crate::{CliError, SCHEMA_VERSION};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    Verified,
    Inconclusive,
    Failed,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIPPED",
            Status::Verified => "VERIFIED",
            Status::Inconclusive => "INCONCLUSIVE",
            Status::Failed => "FAILED",
        }
    }

    fn is_failure(self) -> bool {
        matches!(self, Status::Fail | Status::Failed)
    }
}

impl From<qgamma_core::asymptotics::Verdict> for Status {
    fn from(v: qgamma_core::asymptotics::Verdict) -> Self {
        use qgamma_core::asymptotics::Verdict;
        match v {
            Verdict::Verified => Status::Verified,
            Verdict::Inconclusive => Status::Inconclusive,
            Verdict::Failed => Status::Failed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Case {
    pub group: String,
    pub inputs: String,
    pub residual: f64,
    pub bound: f64,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Case {
    /// `PASS` iff `residual <= bound`.
    pub fn check(group: &str, inputs: String, residual: f64, bound: f64) -> Self {
        let status = if residual <= bound { Status::Pass } else { Status::Fail };
        Self { group: group.into(), inputs, residual, bound, status, note: None }
    }

    pub fn with_status(group: &str, inputs: String, residual: f64, bound: f64, status: Status) -> Self {
        Self { group: group.into(), inputs, residual, bound, status, note: None }
    }

    /// A case whose evaluation raised an error. Degenerate points are
    /// skipped, everything else fails.
    pub fn errored(group: &str, inputs: String, err: &qgamma_core::Error) -> Self {
        let status = match err {
            qgamma_core::Error::Degenerate(_) => Status::Skipped,
            _ => Status::Fail,
        };
        Self { group: group.into(), inputs, residual: f64::NAN, bound: f64::NAN, status, note: Some(err.to_string()) }
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Empirical fit attached to an asymptotic suite.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fit {
    pub label: String,
    pub fitted_c: Option<f64>,
    pub slope: Option<f64>,
    /// What the slope or constant was held against.
    pub criterion: String,
    pub verdict: Status,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub pass_count: usize,
    pub fail_count: usize,
    pub skipped_count: usize,
    pub max_residual: f64,
    pub fits: Vec<Fit>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub suite: String,
    pub precision_bits: u32,
    pub cases: Vec<Case>,
    pub summary: Summary,
}

/// Overall result of a report, ordered by severity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Outcome {
    Pass,
    Inconclusive,
    Fail,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::Inconclusive => 2,
        }
    }
}

impl SuiteReport {
    pub fn new(suite: &str, precision_bits: u32, cases: Vec<Case>, fits: Vec<Fit>) -> Self {
        let count = |s: &[Status]| cases.iter().filter(|c| s.contains(&c.status)).count();
        let max_residual = cases
            .iter()
            .filter(|c| c.status != Status::Skipped && c.residual.is_finite())
            .map(|c| c.residual)
            .fold(0.0, f64::max);
        let summary = Summary {
            pass_count: count(&[Status::Pass, Status::Verified]),
            fail_count: count(&[Status::Fail, Status::Failed]),
            skipped_count: count(&[Status::Skipped]),
            max_residual,
            fits,
        };
        Self { schema_version: SCHEMA_VERSION, suite: suite.into(), precision_bits, cases, summary }
    }

    pub fn outcome(&self) -> Outcome {
        let statuses = self.cases.iter().map(|c| c.status).chain(self.summary.fits.iter().map(|f| f.verdict));
        let mut out = Outcome::Pass;
        for s in statuses {
            if s.is_failure() {
                return Outcome::Fail;
            }
            if s == Status::Inconclusive {
                out = Outcome::Inconclusive;
            }
        }
        out
    }

    pub fn fit(&self, label: &str) -> Option<&Fit> {
        self.summary.fits.iter().find(|f| f.label == label)
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| CliError::Io(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    /// One row per case, then one row per fit with the slope in the
    /// `residual` column and the constant in `bound`.
    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(["suite", "group", "inputs", "residual", "bound", "status", "note"]).map_err(io)?;
        for c in &self.cases {
            w.write_record([
                self.suite.as_str(),
                &c.group,
                &c.inputs,
                &num(c.residual),
                &num(c.bound),
                c.status.as_str(),
                c.note.as_deref().unwrap_or(""),
            ])
            .map_err(io)?;
        }
        for f in &self.summary.fits {
            w.write_record([
                self.suite.as_str(),
                "fit",
                &f.label,
                &f.slope.map(num).unwrap_or_default(),
                &f.fitted_c.map(num).unwrap_or_default(),
                f.verdict.as_str(),
                &f.criterion,
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
    }

    /// Counts, fits, and every case that did not pass.
    pub fn to_text(&self, all_cases: bool) -> String {
        let s = &self.summary;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{}: {} passed, {} failed, {} skipped, max residual {} ({} bits)",
            self.suite,
            s.pass_count,
            s.fail_count,
            s.skipped_count,
            num(s.max_residual),
            self.precision_bits
        );
        for c in &self.cases {
            if all_cases || c.status != Status::Pass {
                let _ = writeln!(
                    out,
                    "  {:<12} {:<8} {:<40} residual {:>12} bound {:>12}{}",
                    c.status.as_str(),
                    c.group,
                    c.inputs,
                    num(c.residual),
                    num(c.bound),
                    c.note.as_ref().map(|n| format!("  ({n})")).unwrap_or_default()
                );
            }
        }
        for f in &s.fits {
            let _ = writeln!(
                out,
                "  {:<12} fit {:<36} slope {:>10} C {:>10}  [{}]",
                f.verdict.as_str(),
                f.label,
                f.slope.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into()),
                f.fitted_c.map(num).unwrap_or_else(|| "-".into()),
                f.criterion
            );
        }
        out
    }
}

/// Fixed-format scientific notation, independent of locale.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.6e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn outcome_follows_worst_status() {
        let pass = Case::check("g", "x=1".into(), 1.0, 2.0);
        let fail = Case::check("g", "x=2".into(), 3.0, 2.0);
        assert_eq!(SuiteReport::new("s", 64, vec![pass.clone()], vec![]).outcome(), Outcome::Pass);
        assert_eq!(SuiteReport::new("s", 64, vec![pass.clone(), fail], vec![]).outcome(), Outcome::Fail);
        let fit = Fit {
            label: "f".into(),
            fitted_c: Some(1.0),
            slope: Some(0.5),
            criterion: "slope >= 0.9".into(),
            verdict: Status::Inconclusive,
        };
        let r = SuiteReport::new("s", 64, vec![pass], vec![fit]);
        assert_eq!(r.outcome(), Outcome::Inconclusive);
        assert_eq!(r.outcome().exit_code(), 2);
        assert!(r.to_csv().unwrap().starts_with("suite,group,inputs,residual,bound,status,note\n"));
        assert!(r.to_json().unwrap().contains("\"schema_version\": 1"));
    }
}
