//! CSV and JSON rendering of sample tables and reports.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Rows of named numeric columns with a metadata block.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<f64>>,
    pub meta: Value,
}

impl Table {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = self.columns.join(",");
                out.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let samples: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, Value> = self
                            .columns
                            .iter()
                            .zip(row)
                            .map(|(k, x)| (k.to_string(), number(*x)))
                            .collect();
                        Value::Object(obj)
                    })
                    .collect();
                let doc = serde_json::json!({ "meta": self.meta, "samples": samples });
                pretty(&doc)
            }
        }
    }
}

/// Reports are JSON documents; CSV flattens them to `key,value` lines.
pub fn render_report(report: &Value, format: Format) -> String {
    match format {
        Format::Json => pretty(report),
        Format::Csv => {
            let mut out = String::from("key,value\n");
            flatten("", report, &mut out);
            out
        }
    }
}

fn flatten(prefix: &str, value: &Value, out: &mut String) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match value {
        Value::Object(map) => map.iter().for_each(|(k, v)| flatten(&join(k), v, out)),
        Value::Array(items) => items
            .iter()
            .enumerate()
            .for_each(|(i, v)| flatten(&join(&i.to_string()), v, out)),
        Value::String(s) => {
            let _ = writeln!(out, "{prefix},{s}");
        }
        other => {
            let _ = writeln!(out, "{prefix},{other}");
        }
    }
}

/// Non-finite values become `null`.
pub fn number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn pretty(doc: &Value) -> String {
    let mut s = serde_json::to_string_pretty(doc).unwrap_or_default();
    s.push('\n');
    s
}
