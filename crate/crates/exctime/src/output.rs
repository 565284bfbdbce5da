//! Report bundles and CSV helpers. Every artifact is a pure function of the
//! collected results: no timestamps, thread counts or host details.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use exctime_core::format::g17;
use exctime_core::stat_tests::TestReport;

use crate::error::Result;

/// A report tagged with the suite that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    #[serde(flatten)]
    pub report: TestReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary<'a> {
    pub experiment: &'a str,
    pub command: &'a str,
    pub seed: u64,
    pub reports: usize,
    pub passed: bool,
    pub failed: Vec<String>,
}

/// Writes `reports.jsonl` and `summary.json` and returns the verdict over
/// the reports selected by `gate`.
pub fn write_bundle(
    dir: &Path,
    experiment: &str,
    command: &str,
    seed: u64,
    reports: &[SuiteReport],
    gate: impl Fn(&SuiteReport) -> bool,
) -> Result<bool> {
    fs::create_dir_all(dir)?;
    let mut out = BufWriter::new(File::create(dir.join("reports.jsonl"))?);
    for r in reports {
        serde_json::to_writer(&mut out, r).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| !r.report.passed)
        .map(|r| format!("{}/{}", r.suite, r.report.name))
        .collect();
    let passed = reports.iter().filter(|r| gate(r)).all(|r| r.report.passed);
    let summary = Summary {
        experiment,
        command,
        seed,
        reports: reports.len(),
        passed,
        failed,
    };
    let mut text = serde_json::to_string_pretty(&summary).map_err(std::io::Error::from)?;
    text.push('\n');
    fs::write(dir.join("summary.json"), text)?;
    Ok(summary.passed)
}

/// Writes a numeric table with `%.17g`-style cells.
pub fn write_table(path: &Path, header: &[String], rows: &[Vec<f64>]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| g17(x)).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    out.flush()?;
    Ok(())
}

/// Shortest round-trip rendering of a grid value, for report names.
pub fn tag(x: f64) -> String {
    format!("{x}")
}
