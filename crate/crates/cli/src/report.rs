//! Report rendering. The default output is line-oriented: `#`-prefixed human
//! summary lines followed by `key=value` pairs, stable across runs so reports
//! diff cleanly. `--json` renders the same keys as one JSON object.

use serde_json::{Map, Value};

#[derive(Debug, Default)]
pub struct Report {
    human: Vec<String>,
    pairs: Vec<(String, Value)>,
}

impl Report {
    pub fn new() -> Report {
        Report::default()
    }

    /// Add a human-oriented comment line (skipped in JSON mode).
    pub fn note(&mut self, line: impl Into<String>) {
        self.human.push(line.into());
    }

    /// Add one key=value pair. Keys are emitted in insertion order.
    pub fn set(&mut self, key: impl Into<String>, value: impl Into<Value>) {
        self.pairs.push((key.into(), value.into()));
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            let mut map = Map::new();
            for (key, value) in &self.pairs {
                map.insert(key.clone(), value.clone());
            }
            let mut out = serde_json::to_string_pretty(&Value::Object(map))
                .expect("report values serialize");
            out.push('\n');
            out
        } else {
            let mut out = String::new();
            for line in &self.human {
                out.push_str("# ");
                out.push_str(line);
                out.push('\n');
            }
            for (key, value) in &self.pairs {
                out.push_str(key);
                out.push('=');
                out.push_str(&plain(value));
                out.push('\n');
            }
            out
        }
    }
}

/// key=value rendering of a JSON value: strings go unquoted.
fn plain(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
