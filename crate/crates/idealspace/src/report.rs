//! Line records and exit statuses.

use idealspace_core::Verdict;
use serde::Serialize;
use serde_json::{json, Map, Value};

/// Exit statuses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Holds = 0,
    Unknown = 2,
    Refuted = 1,
    Usage = 3,
}

impl Status {
    pub fn code(self) -> i32 {
        self as i32
    }

    pub fn of<W>(v: &Verdict<W>) -> Status {
        match v {
            Verdict::Holds => Status::Holds,
            Verdict::Refuted(_) => Status::Refuted,
            Verdict::Unknown => Status::Unknown,
        }
    }

    fn rank(self) -> u8 {
        match self {
            Status::Holds => 0,
            Status::Unknown => 1,
            Status::Refuted => 2,
            Status::Usage => 3,
        }
    }

    /// The worse of two statuses: usage, then refuted, then unknown.
    pub fn worst(self, other: Status) -> Status {
        if other.rank() > self.rank() {
            other
        } else {
            self
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Human,
    Machine,
}

/// Records produced by one command, and its exit status.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub records: Vec<Value>,
    pub status: Status,
}

impl Outcome {
    pub fn new() -> Self {
        Outcome {
            records: Vec::new(),
            status: Status::Holds,
        }
    }

    pub fn usage(pointer: &str, message: &str) -> Self {
        let mut out = Outcome::new();
        out.push("error", json!({"pointer": pointer, "message": message}));
        out.status = Status::Usage;
        out
    }

    /// Append a record; `fields` must be a JSON object.
    pub fn push(&mut self, kind: &str, fields: Value) {
        let mut rec = Map::new();
        rec.insert("kind".into(), Value::from(kind));
        if let Value::Object(obj) = fields {
            rec.extend(obj);
        }
        self.records.push(Value::Object(rec));
    }

    pub fn note(&mut self, status: Status) {
        self.status = self.status.worst(status);
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        for rec in &self.records {
            match format {
                Format::Machine => out.push_str(&rec.to_string()),
                Format::Human => out.push_str(&human_line(rec)),
            }
            out.push('\n');
        }
        out
    }
}

impl Default for Outcome {
    fn default() -> Self {
        Outcome::new()
    }
}

fn human_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn human_line(rec: &Value) -> String {
    let Value::Object(obj) = rec else {
        return rec.to_string();
    };
    let kind = obj.get("kind").map(human_value).unwrap_or_default();
    let rest: Vec<String> = obj
        .iter()
        .filter(|(k, _)| *k != "kind")
        .map(|(k, v)| format!("{k}={}", human_value(v)))
        .collect();
    if rest.is_empty() {
        kind
    } else {
        format!("{kind:<14} {}", rest.join("  "))
    }
}

/// `{"verdict": "refuted", "witness": ...}` and friends.
pub fn verdict<W: Serialize>(v: &Verdict<W>) -> Value {
    match v {
        Verdict::Refuted(w) => json!({"verdict": "refuted", "witness": w}),
        other => json!({"verdict": other.tag()}),
    }
}
