use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    /// Flat `key = value` lines.
    Text,
    /// One JSON object.
    Struct,
}

/// Ordered results of one command. Rationals are stored as exact `p/q`
/// strings, so both renderings carry the same numbers.
#[derive(Debug, Clone)]
pub struct Report {
    entries: Map<String, Value>,
    failures: Vec<String>,
    warnings: Vec<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut entries = Map::new();
        entries.insert("command".into(), command.into());
        Report {
            entries,
            failures: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.entries.insert(key.to_string(), value.into());
    }

    pub fn fail(&mut self, reason: impl Into<String>) {
        self.failures.push(reason.into());
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn finished(&self) -> Map<String, Value> {
        let mut out = self.entries.clone();
        if !self.warnings.is_empty() {
            out.insert("warnings".into(), self.warnings.clone().into());
        }
        out.insert("verdict".into(), if self.passed() { "PASS" } else { "FAIL" }.into());
        if !self.failures.is_empty() {
            out.insert("failures".into(), self.failures.clone().into());
        }
        out
    }

    pub fn render(&self, format: Format) -> String {
        let map = self.finished();
        match format {
            Format::Struct => {
                let mut s = serde_json::to_string_pretty(&Value::Object(map)).expect("plain JSON values");
                s.push('\n');
                s
            }
            Format::Text => {
                let mut out = String::new();
                for (k, v) in &map {
                    flatten(k, v, &mut out);
                }
                out
            }
        }
    }
}

fn is_token(v: &Value) -> bool {
    match v {
        Value::String(s) => !s.is_empty() && !s.contains(|c: char| c.is_whitespace() || c == ','),
        Value::Number(_) | Value::Bool(_) => true,
        Value::Array(items) => items.iter().all(is_token),
        _ => false,
    }
}

fn inline(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => format!("[{}]", items.iter().map(inline).collect::<Vec<_>>().join(",")),
        other => other.to_string(),
    }
}

fn flatten(key: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&format!("{key}.{k}"), v, out);
            }
        }
        Value::Array(items) if !is_token(v) => {
            for (i, item) in items.iter().enumerate() {
                flatten(&format!("{key}.{i}"), item, out);
            }
        }
        _ => {
            out.push_str(key);
            out.push_str(" = ");
            out.push_str(&inline(v));
            out.push('\n');
        }
    }
}
