use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::Value;

use crate::OutputFormat;

pub const SCHEMA: &str = "1";

/// Rows for CSV output.
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

/// A finished command: its report in every supported format and the exit
/// code it asks for.
pub struct Outcome {
    pub json: Value,
    pub text: String,
    pub table: Option<Table>,
    pub code: u8,
}

/// Snake-case label of a serializable enum.
pub fn label<T: Serialize>(x: &T) -> String {
    match serde_json::to_value(x) {
        Ok(Value::String(s)) => s,
        Ok(v) => v.to_string(),
        Err(_) => String::new(),
    }
}

pub fn num(x: f64) -> String {
    format!("{x}")
}

fn render_csv(t: &Table) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&t.headers)?;
    for r in &t.rows {
        w.write_record(r)?;
    }
    Ok(w.into_inner().context("flushing CSV")?)
}

pub fn emit(outcome: &Outcome, format: OutputFormat, out: Option<&Path>) -> Result<()> {
    let bytes = match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&outcome.json)?;
            s.push('\n');
            s.into_bytes()
        }
        OutputFormat::Text => outcome.text.clone().into_bytes(),
        OutputFormat::Csv => match &outcome.table {
            Some(t) => render_csv(t)?,
            None => bail!("this command has no CSV output; use --output json or text"),
        },
    };
    match out {
        Some(path) => std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    Ok(())
}
