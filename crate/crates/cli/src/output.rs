//! Canonical JSON reports and CSV trajectories.

use std::io;
use std::path::Path;

use serde_json::{json, Value};
use yb_core::CheckReport;

use crate::config::RunConfig;

/// Failure entries kept in a report; the counts stay exact.
pub const MAX_REPORTED_FAILURES: usize = 100;

/// Report for one suite run. Keys are emitted sorted (serde_json's default
/// map is ordered), so the text is byte-stable apart from `wall_ms`.
pub fn suite_report(suite: &str, cfg: &RunConfig, r: &CheckReport, wall_ms: u64) -> Value {
    let mut failures: Vec<Value> = r
        .failures
        .iter()
        .take(MAX_REPORTED_FAILURES)
        .map(|f| json!({ "trial": f.trial, "detail": f.detail }))
        .collect();
    if r.passed == 0 && r.failures.is_empty() {
        failures.push(json!({
            "trial": 0,
            "detail": format!("no trial could be evaluated ({} skipped)", r.skipped),
        }));
    }
    let verdict = if failures.is_empty() { "pass" } else { "fail" };
    json!({
        "suite": suite,
        "config": cfg,
        "trials": r.attempted,
        "passed": r.passed,
        "max_residual": r.max_residual,
        "exact": r.exact,
        "failures": failures,
        "verdict": verdict,
        "wall_ms": wall_ms,
    })
}

pub fn is_pass(report: &Value) -> bool {
    report["verdict"] == "pass"
}

pub fn to_canonical_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

pub fn write_report(v: &Value, path: &Path) -> io::Result<()> {
    std::fs::write(path, to_canonical_json(v))
}

/// Header plus rows of canonical scalar strings.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn write_csv(&self, path: &Path) -> io::Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()
    }

    pub fn read_csv(path: &Path) -> io::Result<Self> {
        let mut r = csv::Reader::from_path(path)?;
        let header = r.headers()?.iter().map(String::from).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(String::from).collect()))
            .collect::<Result<_, _>>()?;
        Ok(Self { header, rows })
    }
}
