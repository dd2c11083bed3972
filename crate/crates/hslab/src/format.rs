//! JSON and CSV renderings of a [`Report`].

use crate::config::Format;
use crate::error::AppResult;
use crate::report::{Record, Report};

/// Seventeen significant digits: enough to round-trip any `f64`.
pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn to_json(report: &Report) -> AppResult<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

pub fn from_json(text: &str) -> AppResult<Report> {
    Ok(serde_json::from_str(text)?)
}

fn opt(v: Option<f64>) -> String {
    v.map(float).unwrap_or_default()
}

/// A report holding exactly one table is written as that table; any other
/// report as one row per record.
pub fn to_csv(report: &Report) -> AppResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let tables: Vec<_> = report.results.iter().filter_map(|r| r.table.as_ref()).collect();
    if let [table] = tables[..] {
        w.write_record(&table.columns)?;
        for row in &table.rows {
            w.write_record(row.iter().map(|&v| float(v)))?;
        }
    } else {
        w.write_record(["name", "value", "reference", "deviation", "passed", "provenance", "note"])?;
        for r in &report.results {
            w.write_record(summary_row(r))?;
        }
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv writer emits utf-8"))
}

fn summary_row(r: &Record) -> [String; 7] {
    [
        r.name.clone(),
        opt(r.value),
        opt(r.reference),
        opt(r.deviation),
        r.passed.map(|b| b.to_string()).unwrap_or_default(),
        r.provenance.name().to_string(),
        r.note.clone().unwrap_or_default(),
    ]
}

pub fn render(report: &Report, format: Format) -> AppResult<String> {
    match format {
        Format::Json => to_json(report),
        Format::Csv => to_csv(report),
    }
}
