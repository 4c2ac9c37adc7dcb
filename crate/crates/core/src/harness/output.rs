use std::fmt::Write as _;

use super::checks::{InverseReport, SuiteReport};
use super::lemmas::{LemmaReport, LemmaStatus};
use super::report::RateReport;
use crate::operator::OperatorInstance;

/// Scientific notation with 17 significant digits.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn push_rows(out: &mut String, report: &RateReport, suffix: &[&str]) {
    for r in &report.rows {
        let _ = write!(out, "{},{},{},{}", num(r.scale), num(r.measured), num(r.reference), num(r.ratio));
        for s in suffix {
            let _ = write!(out, ",{}", field(s));
        }
        out.push('\n');
    }
}

/// `scale,measured,reference,ratio`.
pub fn rate_csv(report: &RateReport) -> String {
    let mut out = String::from("scale,measured,reference,ratio\n");
    push_rows(&mut out, report, &[]);
    out
}

/// Rate rows of both sides with a trailing `series` column (`modulus`,
/// `error`).
pub fn inverse_csv(report: &InverseReport) -> String {
    let mut out = String::from("scale,measured,reference,ratio,series\n");
    push_rows(&mut out, &report.modulus, &["modulus"]);
    push_rows(&mut out, &report.error, &["error"]);
    out
}

/// Rate rows of every check with trailing `check,verdict` columns.
pub fn suite_csv(report: &SuiteReport) -> String {
    let mut out = String::from("scale,measured,reference,ratio,check,verdict\n");
    for c in &report.checks {
        push_rows(&mut out, &c.report, &[&c.id, &c.report.verdict.to_string()]);
    }
    out
}

/// One row per lemma sub-check: `lemma,check,status,constant,reason`.
pub fn lemma_csv(report: &LemmaReport) -> String {
    let mut out = String::from("lemma,check,status,constant,reason\n");
    for e in &report.entries {
        let status = match e.status {
            LemmaStatus::Pass => "pass",
            LemmaStatus::Fail => "fail",
            LemmaStatus::Skipped => "skipped",
        };
        if e.checks.is_empty() {
            let _ = writeln!(out, "{},,{},{},{}", e.id, status, num(e.constant), field(e.reason.as_deref().unwrap_or("")));
        }
        for c in &e.checks {
            let constant = if e.id == "lemma5" { c.report.fitted_slope } else { c.report.max_ratio };
            let _ = writeln!(out, "{},{},{},{},", e.id, field(&c.label), c.report.verdict, num(constant));
        }
    }
    out
}

/// `n,k,x,fbar` for the lattice samples of each operator.
pub fn dump_operator_csv(ops: &[OperatorInstance]) -> String {
    let mut out = String::from("n,k,x,fbar\n");
    for op in ops {
        let nf = op.n as f64;
        for (k, s) in op.fbar_samples.iter().enumerate() {
            let _ = writeln!(out, "{},{},{},{}", op.n, k, num(k as f64 / nf), num(*s));
        }
    }
    out
}
