//! Run reports: the command echo, an input digest, the seed, and an ordered
//! result map. Counts are decimal strings, rationals are `num/den` strings
//! and reals carry 15 significant digits, so identical runs produce
//! byte-identical output.

use hamb_core::bounds::rational_string;
use hamb_core::{Count, ExactRational};
use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_digest: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub results: Map<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

impl RunReport {
    pub fn new(command: impl Into<String>) -> Self {
        RunReport {
            command: command.into(),
            input_digest: None,
            seed: None,
            results: Map::new(),
            elapsed_ms: None,
        }
    }

    pub fn digest(mut self, input: &[u8]) -> Self {
        self.input_digest = Some(sha256_hex(input));
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn put(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.results.insert(key.to_string(), value.into());
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// `key: value` lines, nested objects flattened with dotted keys.
    pub fn to_text(&self) -> String {
        let mut out = format!("command: {}\n", self.command);
        if let Some(d) = &self.input_digest {
            out.push_str(&format!("input_digest: {d}\n"));
        }
        if let Some(s) = self.seed {
            out.push_str(&format!("seed: {s}\n"));
        }
        for (k, v) in &self.results {
            flatten(k, v, &mut out);
        }
        if let Some(ms) = self.elapsed_ms {
            out.push_str(&format!("elapsed_ms: {}\n", real(ms)));
        }
        out
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            self.to_json()
        } else {
            self.to_text()
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => "-".to_string(),
        Value::String(s) => s.clone(),
        Value::Array(items) if items.is_empty() => "-".to_string(),
        Value::Array(items) => items.iter().map(scalar).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, inner) in map {
                flatten(&format!("{prefix}.{k}"), inner, out);
            }
        }
        Value::Array(items) if items.iter().any(Value::is_object) => {
            for (i, inner) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), inner, out);
            }
        }
        other => out.push_str(&format!("{prefix}: {}\n", scalar(other))),
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

pub fn count(c: &Count) -> Value {
    Value::String(c.to_string())
}

pub fn rational(q: &ExactRational) -> Value {
    Value::String(rational_string(q))
}

/// A real with 15 significant digits, trailing zeros trimmed. Very large
/// or very small magnitudes use exponent notation.
pub fn real(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.14e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..15).contains(&exp) {
        let decimals = (14 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub fn real_value(x: f64) -> Value {
    Value::String(real(x))
}
