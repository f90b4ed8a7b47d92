//! JSON report emitted by every command (`schema: 1`).

use std::collections::BTreeMap;

use optfilter_core::checks::Check;
use optfilter_core::example::TrialReport;
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl From<&Check> for CheckEntry {
    fn from(c: &Check) -> Self {
        Self {
            name: c.name.clone(),
            residual: c.residual,
            threshold: c.threshold,
            pass: c.pass,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialEntry {
    pub label: String,
    pub omega: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub g_hat: Vec<f64>,
    pub max_abs_err: f64,
}

impl From<&TrialReport> for TrialEntry {
    fn from(t: &TrialReport) -> Self {
        Self {
            label: t.outcome.label.clone(),
            omega: t.outcome.omega.clone(),
            f: t.f_real.clone(),
            g: t.g_true.clone(),
            g_hat: t.g_hat.clone(),
            max_abs_err: t.max_abs_err,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Dims {
    pub rows: usize,
    pub cols: usize,
}

/// Expected observation error after keeping the leading `n` eigen-directions.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TruncationEntry {
    pub n: usize,
    pub observation_error: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    /// Arguments as given, for the record.
    pub args: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub filter: Option<Dims>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub retained_rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance_used: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_error: Option<f64>,
    pub checks: Vec<CheckEntry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub trials: Vec<TrialEntry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub truncation: Vec<TruncationEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub example_consistent: Option<bool>,
    pub pass: bool,
    /// Kept last so that reports of identical runs differ only in the tail.
    pub timing: Timing,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            command: command.to_owned(),
            args: BTreeMap::new(),
            filter: None,
            retained_rank: None,
            tolerance_used: None,
            expected_error: None,
            checks: Vec::new(),
            trials: Vec::new(),
            truncation: Vec::new(),
            example_consistent: None,
            pass: true,
            timing: Timing { elapsed_ms: 0.0 },
        }
    }

    pub fn arg(&mut self, key: &str, value: impl ToString) {
        self.args.insert(key.to_owned(), value.to_string());
    }

    pub fn add_checks<'a>(&mut self, checks: impl IntoIterator<Item = &'a Check>) {
        self.checks.extend(checks.into_iter().map(CheckEntry::from));
        self.pass = self.checks.iter().all(|c| c.pass);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields are plain data")
    }
}
