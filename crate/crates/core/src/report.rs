//! Verification reports and their deterministic rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub expected: f64,
    pub predicted: f64,
    pub residual: f64,
    pub passed: bool,
}

/// Result of a verifier or classifier, with one record per check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub name: String,
    pub verified: bool,
    pub tolerance: f64,
    pub max_residual: f64,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub flags: BTreeMap<String, bool>,
    #[serde(default)]
    pub metrics: BTreeMap<String, f64>,
    #[serde(default)]
    pub notes: Vec<String>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(name: impl Into<String>, tolerance: f64) -> Self {
        Report {
            name: name.into(),
            verified: true,
            tolerance,
            max_residual: 0.0,
            seed: None,
            flags: BTreeMap::new(),
            metrics: BTreeMap::new(),
            notes: Vec::new(),
            checks: Vec::new(),
        }
    }

    /// Records `|expected - predicted|` against the report tolerance.
    pub fn check(&mut self, id: impl Into<String>, expected: f64, predicted: f64) -> bool {
        let residual = (expected - predicted).abs();
        self.check_residual(id, expected, predicted, residual)
    }

    /// Records a check whose residual is computed by the caller.
    pub fn check_residual(&mut self, id: impl Into<String>, expected: f64, predicted: f64, residual: f64) -> bool {
        let residual = if residual.is_nan() { f64::MAX } else { residual.min(f64::MAX) };
        let passed = residual <= self.tolerance;
        self.max_residual = self.max_residual.max(residual);
        self.verified &= passed;
        self.checks.push(Check { id: id.into(), expected, predicted, residual, passed });
        passed
    }

    /// Records a boolean requirement; a false value fails the report.
    pub fn require(&mut self, flag: impl Into<String>, value: bool) {
        self.verified &= value;
        self.flags.insert(flag.into(), value);
    }

    /// Records an informational flag that does not affect the verdict.
    pub fn flag(&mut self, flag: impl Into<String>, value: bool) {
        self.flags.insert(flag.into(), value);
    }

    pub fn metric(&mut self, name: impl Into<String>, value: f64) {
        self.metrics.insert(name.into(), value);
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// Folds another report in, prefixing its check ids.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for c in other.checks {
            let id = format!("{prefix}/{}", c.id);
            self.max_residual = self.max_residual.max(c.residual);
            self.verified &= c.passed;
            self.checks.push(Check { id, ..c });
        }
        for (k, v) in other.flags {
            self.flags.insert(format!("{prefix}/{k}"), v);
        }
        for (k, v) in other.metrics {
            self.metrics.insert(format!("{prefix}/{k}"), v);
        }
        self.notes.extend(other.notes.into_iter().map(|n| format!("{prefix}: {n}")));
        self.verified &= other.verified;
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::InvalidArgument(format!("unknown format `{other}`"))),
        }
    }
}

/// Fixed 17-significant-digit float text.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Deterministic serialization: declared key order, 17 significant digits.
pub fn render_report(report: &Report, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut out = render_json(&serde_json::to_value(report)?);
            out.push('\n');
            Ok(out.into_bytes())
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["check-id", "expected", "predicted", "residual"])?;
            for c in &report.checks {
                w.write_record([
                    c.id.clone(),
                    format_float(c.expected),
                    format_float(c.predicted),
                    format_float(c.residual),
                ])?;
            }
            w.into_inner().map_err(|e| Error::Io(e.into_error()))
        }
    }
}

/// Pretty JSON with floats printed via [`format_float`].
pub fn render_json(value: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, value, 0);
    out
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&format_float(n.as_f64().unwrap_or(0.0)));
            } else {
                let _ = write!(out, "{n}");
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).unwrap_or_default()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                pad(out, indent + 2);
                write_value(out, item, indent + 2);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (k, (key, item)) in map.iter().enumerate() {
                pad(out, indent + 2);
                out.push_str(&serde_json::to_string(key).unwrap_or_default());
                out.push_str(": ");
                write_value(out, item, indent + 2);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push('}');
        }
    }
}

fn pad(out: &mut String, n: usize) {
    out.extend(std::iter::repeat_n(' ', n));
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("sample", 1e-10);
        r.check("a,b", 0.5, 0.5);
        r.check("c", 1.0 / 3.0, 0.333);
        r.metric("epsilon", 0.125);
        r.flag("analytic", true);
        r.with_seed(42)
    }

    #[test]
    fn rendering_is_byte_stable() {
        let r = sample();
        assert_eq!(render_report(&r, Format::Json).unwrap(), render_report(&r, Format::Json).unwrap());
        assert_eq!(render_report(&r, Format::Csv).unwrap(), render_report(&r, Format::Csv).unwrap());
    }

    #[test]
    fn csv_header_and_quoting() {
        let text = String::from_utf8(render_report(&sample(), Format::Csv).unwrap()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("check-id,expected,predicted,residual"));
        assert!(lines.next().unwrap().starts_with("\"a,b\",5.0000000000000000e-1"));
    }

    #[test]
    fn json_round_trips() {
        let r = sample();
        let text = String::from_utf8(render_report(&r, Format::Json).unwrap()).unwrap();
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        assert!(!r.verified);
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(0.0), "0.0000000000000000e0");
    }
}
