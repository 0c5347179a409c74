//! Rendering of command results as JSON, CSV or plain text.

use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plain,
}

/// What a command produced: either a document to print verbatim (graph
/// text) or one result object per input instance.
pub enum Report {
    Text(String),
    Records {
        provenance: Value,
        records: Vec<Map<String, Value>>,
    },
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match self {
            Report::Text(text) => match format {
                Format::Json => {
                    let mut out = serde_json::to_string_pretty(&serde_json::json!({ "text": text }))
                        .expect("json");
                    out.push('\n');
                    out
                }
                _ => text.clone(),
            },
            Report::Records {
                provenance,
                records,
            } => match format {
                Format::Json => json(provenance, records),
                Format::Csv => csv(records),
                Format::Plain => plain(records),
            },
        }
    }
}

fn json(provenance: &Value, records: &[Map<String, Value>]) -> String {
    let doc = if let [single] = records {
        let mut obj = single.clone();
        obj.insert("provenance".into(), provenance.clone());
        Value::Object(obj)
    } else {
        serde_json::json!({ "results": records, "provenance": provenance })
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("json");
    out.push('\n');
    out
}

/// A cell for flat formats: strings bare, `{num, den}` as `num/den`, arrays
/// joined by `;`, other objects as compact JSON.
fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(cell).collect::<Vec<_>>().join(";"),
        Value::Object(o) => match (o.get("num"), o.get("den")) {
            (Some(n), Some(d)) if o.len() == 2 => format!("{n}/{d}"),
            _ => v.to_string(),
        },
        other => other.to_string(),
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv(records: &[Map<String, Value>]) -> String {
    let mut columns: Vec<&String> = Vec::new();
    for r in records {
        for k in r.keys() {
            if !columns.contains(&k) {
                columns.push(k);
            }
        }
    }
    let mut out = columns
        .iter()
        .map(|c| csv_escape(c))
        .collect::<Vec<_>>()
        .join(",");
    out.push('\n');
    for r in records {
        let row: Vec<String> = columns
            .iter()
            .map(|c| csv_escape(&r.get(*c).map(cell).unwrap_or_default()))
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn plain(records: &[Map<String, Value>]) -> String {
    let mut out = String::new();
    for (i, r) in records.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        for (k, v) in r {
            out.push_str(&format!("{k}: {}\n", cell(v)));
        }
    }
    out
}
