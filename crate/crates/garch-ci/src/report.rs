//! Deterministic CSV and JSON rendering of experiment results.
//!
//! Formatting is fixed-precision so identical runs produce identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;
use crate::harness::{CoverageReport, TableReport};

pub fn coverage_csv(report: &CoverageReport) -> String {
    let mut out = String::from("innovation,method,n,coverage,mean_length,se,failures\n");
    for row in &report.rows {
        writeln!(
            out,
            "{},{},{},{:.4},{:.6},{:.4},{}",
            row.innovation, row.method, row.n, row.coverage, row.mean_length, row.se, row.failures
        )
        .expect("string write");
    }
    out
}

pub fn coverage_json(report: &CoverageReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn table_csv(report: &TableReport) -> String {
    let mut out = String::from(
        "innovation,method,n,coverage,paper_coverage,coverage_ok,mean_length,paper_length,length_ok,se,failures\n",
    );
    for c in &report.cells {
        let paper_len = c.paper_length.map_or(String::new(), |v| format!("{v:.4}"));
        let len_ok = match (c.length_excluded, c.length_ok) {
            (true, _) => "excluded".to_string(),
            (false, Some(ok)) => ok.to_string(),
            (false, None) => String::new(),
        };
        writeln!(
            out,
            "{},{},{},{:.4},{:.4},{},{:.6},{},{},{:.4},{}",
            c.innovation,
            c.method,
            c.n,
            c.coverage,
            c.paper_coverage,
            c.coverage_ok,
            c.mean_length,
            paper_len,
            len_ok,
            c.se,
            c.failures
        )
        .expect("string write");
    }
    out
}

pub fn table_json(report: &TableReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// Human-readable side-by-side listing for the terminal.
pub fn table_text(report: &TableReport) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{} reproduction: seed {}, {} replications, level {:.2}",
        report.table, report.seed, report.n_reps, report.level
    )
    .expect("string write");
    writeln!(
        out,
        "{:<12} {:<15} {:>5}  {:>8} {:>8} {:>5}  {:>9} {:>9} {:>8}",
        "innovation", "method", "n", "cov", "paper", "ok", "length", "paper", "ok"
    )
    .expect("string write");
    for c in &report.cells {
        let len_paper = c.paper_length.map_or("-".to_string(), |v| format!("{v:.4}"));
        let len_ok = match (c.length_excluded, c.length_ok) {
            (true, _) => "excl",
            (false, Some(true)) => "yes",
            (false, Some(false)) => "NO",
            (false, None) => "-",
        };
        writeln!(
            out,
            "{:<12} {:<15} {:>5}  {:>8.3} {:>8.3} {:>5}  {:>9.4} {:>9} {:>8}",
            c.innovation,
            c.method,
            c.n,
            c.coverage,
            c.paper_coverage,
            if c.coverage_ok { "yes" } else { "NO" },
            c.mean_length,
            len_paper,
            len_ok
        )
        .expect("string write");
    }
    if let Some(trend) = report.trend_ok {
        writeln!(out, "length trend monotone in p: {}", if trend { "yes" } else { "NO" })
            .expect("string write");
    }
    writeln!(out, "all checks: {}", if report.all_ok { "pass" } else { "FAIL" })
        .expect("string write");
    out
}

pub fn write_table_reports(report: &TableReport, dir: &Path, format: &str) -> Result<Vec<String>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    if format == "csv" || format == "both" {
        let path = dir.join(format!("{}_report.csv", report.table));
        std::fs::write(&path, table_csv(report))?;
        written.push(path.display().to_string());
    }
    if format == "json" || format == "both" {
        let path = dir.join(format!("{}_report.json", report.table));
        std::fs::write(&path, table_json(report))?;
        written.push(path.display().to_string());
    }
    Ok(written)
}
