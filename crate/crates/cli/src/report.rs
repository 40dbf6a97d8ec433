use serde::Serialize;
use serde_json::{Map, Value};

use crate::args::Output;

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub model: &'static str,
    pub params: Value,
    pub estimates: Value,
    pub tests: Vec<Value>,
    pub diagnostics: Value,
    pub seed: u64,
    pub version: &'static str,
}

impl Report {
    pub fn new(command: &'static str, model: &'static str, seed: u64) -> Self {
        Self {
            command,
            model,
            params: Value::Object(Map::new()),
            estimates: Value::Null,
            tests: Vec::new(),
            diagnostics: Value::Object(Map::new()),
            seed,
            version: env!("CARGO_PKG_VERSION"),
        }
    }

    pub fn render(&self, output: Output) -> String {
        match output {
            Output::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Output::Table => {
                let v = serde_json::to_value(self).expect("report serializes");
                let mut out = String::new();
                write_value(&mut out, &v, 0);
                out
            }
        }
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(match n.as_f64() {
            Some(x) if n.is_f64() => format!("{x:.6}"),
            _ => n.to_string(),
        }),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) if items.iter().all(|i| !i.is_object() && !i.is_array()) => Some(
            items
                .iter()
                .map(|i| scalar(i).unwrap_or_default())
                .collect::<Vec<_>>()
                .join("  "),
        ),
        _ => None,
    }
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            for (k, item) in map {
                match scalar(item) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        write_value(out, item, depth + 1);
                    }
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                match scalar(item) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        write_value(out, item, depth + 1);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}
