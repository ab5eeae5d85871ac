use std::collections::BTreeMap;
use std::io::Write;

use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

#[derive(Clone, Debug)]
pub struct Manifest {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub channel_exponent: f64,
    pub tool_version: String,
    pub timestamp: String,
}

#[derive(Clone, Debug)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

/// `x` with `digits` significant digits; scientific notation when
/// `|x| < 1e-4` or `|x| >= 1e6`.
pub fn format_number(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let magnitude = x.abs();
    if !(1e-4..1e6).contains(&magnitude) {
        return format!("{:.*e}", digits - 1, x);
    }
    let exponent = magnitude.log10().floor() as i32;
    let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Rounds `x` to `digits` significant digits through its printed form.
fn rounded(x: f64, digits: usize) -> Value {
    format_number(x, digits)
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .map(Value::from)
        .unwrap_or(Value::Null)
}

pub fn write_csv(
    out: &mut dyn Write,
    manifest: &Manifest,
    table: &Table,
    digits: usize,
) -> std::io::Result<()> {
    writeln!(out, "# command: {}", manifest.command)?;
    for (key, value) in &manifest.parameters {
        writeln!(out, "# parameter {key}: {value}")?;
    }
    writeln!(
        out,
        "# channel_exponent: {}",
        format_number(manifest.channel_exponent, digits)
    )?;
    writeln!(out, "# tool_version: {}", manifest.tool_version)?;
    writeln!(out, "# timestamp: {}", manifest.timestamp)?;

    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(&table.columns)?;
    for row in &table.rows {
        writer.write_record(row.iter().map(|cell| match cell {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format_number(*x, digits),
            Cell::Text(s) => s.clone(),
        }))?;
    }
    writer.flush()
}

pub fn write_json(
    out: &mut dyn Write,
    manifest: &Manifest,
    table: &Table,
    digits: usize,
) -> std::io::Result<()> {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            Value::Array(
                row.iter()
                    .map(|cell| match cell {
                        Cell::Int(i) => Value::from(*i),
                        Cell::Float(x) => rounded(*x, digits),
                        Cell::Text(s) => Value::from(s.as_str()),
                    })
                    .collect(),
            )
        })
        .collect();
    let document = json!({
        "manifest": {
            "command": manifest.command,
            "parameters": manifest.parameters,
            "channel_exponent": rounded(manifest.channel_exponent, digits),
            "tool_version": manifest.tool_version,
            "timestamp": manifest.timestamp,
        },
        "columns": table.columns,
        "rows": rows,
    });
    serde_json::to_writer(&mut *out, &document)?;
    writeln!(out)
}
