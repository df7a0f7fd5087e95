use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::Error;

/// Exit codes of the command-line tool.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// One result document per command invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub command: String,
    pub inputs: Map<String, Value>,
    pub outputs: Map<String, Value>,
    pub diagnostics: Map<String, Value>,
    pub status: String,
}

impl Envelope {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            inputs: Map::new(),
            outputs: Map::new(),
            diagnostics: Map::new(),
            status: "ok".into(),
        }
    }

    pub fn input(&mut self, key: &str, v: impl Serialize) -> &mut Self {
        self.inputs.insert(key.into(), to_value(v));
        self
    }

    pub fn output(&mut self, key: &str, v: impl Serialize) -> &mut Self {
        self.outputs.insert(key.into(), to_value(v));
        self
    }

    pub fn diagnostic(&mut self, key: &str, v: impl Serialize) -> &mut Self {
        self.diagnostics.insert(key.into(), to_value(v));
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("envelopes serialize")
    }

    /// Outputs flattened to `(name, number)` columns; arrays become
    /// `name1`, `name2`, …
    pub fn flat_outputs(&self) -> Vec<(String, Value)> {
        let mut cols = Vec::new();
        for (k, v) in &self.outputs {
            match v {
                Value::Array(items) => {
                    for (i, item) in items.iter().enumerate() {
                        cols.push((format!("{k}{}", i + 1), item.clone()));
                    }
                }
                other => cols.push((k.clone(), other.clone())),
            }
        }
        cols
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

/// Every number in `v` is finite. Non-finite floats serialize as null, so
/// a null in an ok envelope marks an infinite or NaN result.
pub fn all_finite(v: &Map<String, Value>) -> bool {
    fn check(v: &Value) -> bool {
        match v {
            Value::Null => false,
            Value::Number(n) => n.as_f64().is_some_and(f64::is_finite),
            Value::Array(a) => a.iter().all(check),
            Value::Object(o) => o.values().all(check),
            _ => true,
        }
    }
    v.values().all(check)
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numeric(Error),
    Verify(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Numeric(_) => EXIT_NUMERIC,
            Failure::Verify(_) => EXIT_VERIFY,
        }
    }

    pub fn category(&self) -> &'static str {
        match self {
            Failure::Usage(_) => "usage",
            Failure::Numeric(e) => e.category(),
            Failure::Verify(_) => "verification",
        }
    }

    pub fn message(&self) -> String {
        match self {
            Failure::Usage(m) | Failure::Verify(m) => m.clone(),
            Failure::Numeric(e) => e.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Shape { .. } | Error::InvalidParameter(_) | Error::InvalidDistribution(_) | Error::InvalidState(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Numeric(other),
        }
    }
}
