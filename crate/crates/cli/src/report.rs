//! Rendering of reports as JSON, Markdown or CSV.

use std::fmt::Write as _;

use anyhow::Result;
use serde_json::Value;

use crate::run::{CheckReport, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Md,
    Csv,
}

pub fn emit(report: &Report, format: Format) -> Result<String> {
    match format {
        Format::Json => json(report),
        Format::Md => Ok(markdown(report)),
        Format::Csv => csv(report),
    }
}

/// Pretty JSON with a trailing newline. Maps are ordered and wall times are
/// left out, so equal inputs give equal bytes.
pub fn json(report: &Report) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

fn worst_cell(c: &CheckReport) -> (String, String) {
    match c.worst() {
        Some(a) => (a.name.clone(), format!("{:.6e} {} {:.1e}", a.value, a.relation.symbol(), a.bound)),
        None => ("-".into(), "-".into()),
    }
}

fn value_cell(v: &Value) -> String {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => format!("{x:.6e}"),
            _ => n.to_string(),
        },
        Value::Array(items) if items.len() == 2 && items.iter().all(Value::is_f64) => {
            format!("{:.6e}{:+.6e}i", items[0].as_f64().unwrap_or(0.0), items[1].as_f64().unwrap_or(0.0))
        }
        other => other.to_string(),
    }
}

pub fn markdown(report: &Report) -> String {
    let mut s = String::new();
    let sm = &report.summary;
    let _ = writeln!(s, "# {}\n", report.scenario);
    let _ = writeln!(s, "seed {} · {} checks: {} passed, {} failed, {} errors · {:.2} s\n", report.seed, sm.checks, sm.passed, sm.failed, sm.errors, report.wall_time);
    let _ = writeln!(s, "| check | op | status | assertions | worst | value | wall (ms) |");
    let _ = writeln!(s, "|---|---|---|---|---|---|---|");
    for c in &report.checks {
        let (name, value) = worst_cell(c);
        let _ = writeln!(
            s,
            "| {} | {} | {} | {}/{} | {} | {} | {:.1} |",
            c.id,
            c.op,
            c.status.as_str(),
            c.passed_assertions(),
            c.assertions.len(),
            name,
            value,
            c.wall_time * 1e3
        );
    }
    for c in &report.checks {
        let noteworthy = c.error.is_some() || !c.summary.is_empty() || !c.warnings.is_empty() || !c.values.is_empty();
        if !noteworthy {
            continue;
        }
        let _ = writeln!(s, "\n## {}\n", c.id);
        if let Some(e) = &c.error {
            let _ = writeln!(s, "error: {e}\n");
        }
        for line in &c.summary {
            let _ = writeln!(s, "{line}\n");
        }
        for a in c.assertions.iter().filter(|a| !a.pass) {
            let _ = writeln!(s, "- FAIL {}: {} ({:.6e} {} {:.1e})", a.name, a.identity, a.value, a.relation.symbol(), a.bound);
        }
        for w in &c.warnings {
            let _ = writeln!(s, "- warning: {w}");
        }
        for (k, v) in &c.values {
            let _ = writeln!(s, "- {k} = {}", value_cell(v));
        }
    }
    s
}

pub const CSV_HEADER: [&str; 7] = ["id", "op", "module", "status", "passed", "worst_value", "wall_time_ms"];

pub fn csv(report: &Report) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for c in &report.checks {
        let worst = c.worst().map(|a| format!("{:.6e}", a.value)).unwrap_or_default();
        w.write_record([
            c.id.clone(),
            c.op.clone(),
            c.module.clone(),
            c.status.as_str().to_string(),
            format!("{}/{}", c.passed_assertions(), c.assertions.len()),
            worst,
            format!("{:.3}", c.wall_time * 1e3),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}
