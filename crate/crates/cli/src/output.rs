//! Report serialization and output-path handling.

use serde::Serialize;
use serde_json::Value;

use crate::{CliError, Format, OutputArgs};

/// Serialize a payload per the requested format and write it to the
/// destination. CSV for non-tabular payloads is a flat key,value listing.
pub fn emit<T: Serialize>(payload: &T, output: &OutputArgs) -> Result<(), CliError> {
    let text = match output.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(payload)
                .map_err(|e| CliError { code: 1, message: e.to_string() })?;
            s.push('\n');
            s
        }
        Format::Csv => {
            let value = serde_json::to_value(payload)
                .map_err(|e| CliError { code: 1, message: e.to_string() })?;
            to_csv(&value)
        }
    };
    write_text(&output.out, &text)
}

pub fn write_text(dest: &str, text: &str) -> Result<(), CliError> {
    if dest == "-" {
        use std::io::Write;
        std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(CliError::from)
    } else {
        std::fs::write(dest, text).map_err(CliError::from)
    }
}

/// Flatten a JSON payload to CSV. Arrays of objects become a real table;
/// everything else becomes key,value rows with dotted paths.
fn to_csv(value: &Value) -> String {
    if let Some(rows) = tabular_rows(value) {
        return rows;
    }
    let mut lines = vec!["key,value".to_string()];
    flatten("", value, &mut lines);
    lines.join("\n") + "\n"
}

fn tabular_rows(value: &Value) -> Option<String> {
    let obj = value.as_object()?;
    // single array-of-objects field → that is the table
    let arrays: Vec<(&String, &Vec<Value>)> = obj
        .iter()
        .filter_map(|(k, v)| v.as_array().map(|a| (k, a)))
        .filter(|(_, a)| !a.is_empty() && a.iter().all(|r| r.is_object()))
        .collect();
    if arrays.len() != 1 {
        return None;
    }
    let rows = arrays[0].1;
    let first = rows[0].as_object()?;
    let headers: Vec<&String> = first.keys().collect();
    let mut out = headers
        .iter()
        .map(|h| h.as_str())
        .collect::<Vec<_>>()
        .join(",")
        + "\n";
    for row in rows {
        let row = row.as_object()?;
        let cells: Vec<String> = headers.iter().map(|h| scalar(&row[h.as_str()])).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Some(out)
}

fn flatten(prefix: &str, value: &Value, lines: &mut Vec<String>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let path = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&path, v, lines);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), v, lines);
            }
        }
        other => lines.push(format!("{prefix},{}", scalar(other))),
    }
}

fn scalar(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}
