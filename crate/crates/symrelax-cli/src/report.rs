//! Run reports: one JSON schema shared by all subcommands, plus helpers
//! that keep the human-readable rendering numerically identical to it.
//!
//! Reruns with the same inputs produce byte-identical machine-readable
//! reports, so wall-clock timing is printed on the human side only.

use serde::Serialize;

use crate::error::CliError;

/// Schema version stamped into every machine-readable report.
pub const SCHEMA_VERSION: u32 = 1;

/// Envelope around a command-specific body.
#[derive(Debug, Serialize)]
pub struct RunReport<T: Serialize> {
    /// Stable schema version of the report layout.
    pub schema_version: u32,
    /// Subcommand that produced the report.
    pub command: &'static str,
    /// Command-specific payload.
    #[serde(flatten)]
    pub body: T,
}

impl<T: Serialize> RunReport<T> {
    /// Wrap a payload under the current schema version.
    pub fn new(command: &'static str, body: T) -> Self {
        RunReport {
            schema_version: SCHEMA_VERSION,
            command,
            body,
        }
    }

    /// Serialize to the canonical machine-readable form.
    pub fn to_json(&self) -> Result<String, CliError> {
        serde_json::to_string_pretty(self)
            .map_err(|e| CliError::input(format!("cannot serialize report: {e}")))
    }

    /// Write the machine-readable report when a path was requested.
    pub fn write(&self, path: Option<&std::path::Path>) -> Result<(), CliError> {
        let Some(path) = path else {
            return Ok(());
        };
        let mut text = self.to_json()?;
        text.push('\n');
        std::fs::write(path, text)
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
    }
}

/// A value that may be ±∞ or absent; JSON-safe.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(untagged)]
pub enum ReportedValue {
    /// Ordinary finite value.
    Finite(f64),
    /// Text stand-in: "inf", "-inf" or "none".
    Text(&'static str),
}

impl ReportedValue {
    /// Classify a float.
    pub fn of(x: f64) -> ReportedValue {
        if x.is_finite() {
            ReportedValue::Finite(x)
        } else if x > 0.0 {
            ReportedValue::Text("inf")
        } else if x < 0.0 {
            ReportedValue::Text("-inf")
        } else {
            ReportedValue::Text("none")
        }
    }

    /// Classify an optional float.
    pub fn of_option(x: Option<f64>) -> ReportedValue {
        match x {
            Some(v) => ReportedValue::of(v),
            None => ReportedValue::Text("none"),
        }
    }
}

/// Render a float exactly as the machine-readable report does.
pub fn fmt_value(x: f64) -> String {
    match ReportedValue::of(x) {
        ReportedValue::Finite(v) => {
            serde_json::to_string(&v).expect("finite float serializes")
        }
        ReportedValue::Text(t) => t.to_string(),
    }
}

/// Render an optional float the same way.
pub fn fmt_option(x: Option<f64>) -> String {
    match x {
        Some(v) => fmt_value(v),
        None => "none".to_string(),
    }
}

/// Render a point as `(a, b, c)` with report-identical coordinates.
pub fn fmt_point(xs: &[f64]) -> String {
    let coords: Vec<String> = xs.iter().map(|&x| fmt_value(x)).collect();
    format!("({})", coords.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_carries_schema_version() {
        #[derive(Serialize)]
        struct Body {
            value: f64,
        }
        let r = RunReport::new("demo", Body { value: 4.5 });
        let json = r.to_json().unwrap();
        assert!(json.contains("\"schema_version\": 1"), "json: {json}");
        assert!(json.contains("\"command\": \"demo\""), "json: {json}");
        assert!(json.contains("\"value\": 4.5"), "json: {json}");
    }

    #[test]
    fn human_and_machine_agree_on_rendering() {
        for x in [3.0, 4.5, 1.0 / 3.0, -2.25e-7, 0.0] {
            let human = fmt_value(x);
            let machine = serde_json::to_string(&x).unwrap();
            assert_eq!(human, machine);
        }
        assert_eq!(fmt_value(f64::INFINITY), "inf");
        assert_eq!(fmt_value(f64::NEG_INFINITY), "-inf");
        assert_eq!(fmt_option(None), "none");
        assert_eq!(fmt_point(&[1.5, 1.5, 0.0]), "(1.5, 1.5, 0.0)");
    }

    #[test]
    fn infinite_values_serialize_as_text() {
        let v = ReportedValue::of(f64::INFINITY);
        assert_eq!(serde_json::to_string(&v).unwrap(), "\"inf\"");
        let v = ReportedValue::of_option(None);
        assert_eq!(serde_json::to_string(&v).unwrap(), "\"none\"");
    }
}
