//! Reports, their checksum and the CSV check table.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::{CommandId, RunConfig};

pub const TOOL: &str = "perron";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct CheckRow {
    pub name: String,
    pub analytic: Option<f64>,
    pub observed: Option<f64>,
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    pub pass: bool,
    /// Recorded for context; does not affect the exit status.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub informational: bool,
}

fn finite(x: Option<f64>) -> Option<f64> {
    x.filter(|v| v.is_finite())
}

impl CheckRow {
    pub fn new(name: impl Into<String>, analytic: Option<f64>, observed: Option<f64>, tolerance: Option<f64>, pass: bool) -> Self {
        Self {
            name: name.into(),
            analytic: finite(analytic),
            observed: finite(observed),
            tolerance: finite(tolerance),
            stderr: None,
            pass,
            informational: false,
        }
    }

    pub fn with_stderr(mut self, stderr: f64) -> Self {
        self.stderr = finite(Some(stderr));
        self
    }

    pub fn informational(mut self) -> Self {
        self.informational = true;
        self
    }
}

/// Wall-clock data; excluded from the checksum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct Timing {
    pub elapsed_ms: f64,
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: CommandId,
    /// The resolved configuration, defaults included.
    pub config: RunConfig,
    pub checks: Vec<CheckRow>,
    /// Command-specific payload.
    #[schemars(with = "serde_json::Map<String, serde_json::Value>")]
    pub data: Value,
    pub pass: bool,
    /// SHA-256 of the report without `checksum` and `timing`.
    pub checksum: String,
    pub timing: Timing,
}

#[derive(Serialize)]
struct Checked<'a> {
    tool: &'a str,
    version: &'a str,
    command: CommandId,
    config: &'a RunConfig,
    checks: &'a [CheckRow],
    data: &'a Value,
    pass: bool,
}

impl Report {
    pub fn new(config: RunConfig, checks: Vec<CheckRow>, data: Value, timing: Timing) -> Self {
        let command = config.command.expect("resolved config names its command");
        let pass = checks.iter().all(|c| c.pass || c.informational);
        let mut r = Report {
            tool: TOOL.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command,
            config,
            checks,
            data,
            pass,
            checksum: String::new(),
            timing,
        };
        r.checksum = r.compute_checksum();
        r
    }

    pub fn compute_checksum(&self) -> String {
        let body = Checked {
            tool: &self.tool,
            version: &self.version,
            command: self.command,
            config: &self.config,
            checks: &self.checks,
            data: &self.data,
            pass: self.pass,
        };
        let bytes = serde_json::to_vec(&body).expect("report serialises");
        hex::encode(Sha256::digest(bytes))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }

    /// `check,analytic,empirical,stderr,pass`, numbers with 17 significant digits.
    pub fn checks_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["check", "analytic", "empirical", "stderr", "pass"]).expect("in-memory write");
        for c in &self.checks {
            w.write_record([
                c.name.clone(),
                sig(c.analytic),
                sig(c.observed),
                sig(c.stderr),
                c.pass.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    /// One line per check for terminal output.
    pub fn summary_lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| {
                let status = match (c.pass, c.informational) {
                    (_, true) => "info",
                    (true, false) => "PASS",
                    (false, false) => "FAIL",
                };
                format!(
                    "{status} {} analytic={} observed={} tolerance={}",
                    c.name,
                    sig(c.analytic),
                    sig(c.observed),
                    sig(c.tolerance)
                )
            })
            .collect()
    }
}

/// Seventeen significant digits, enough to round-trip a double.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

fn sig(x: Option<f64>) -> String {
    x.map(sig17).unwrap_or_default()
}

/// JSON Schema of [`Report`].
pub fn report_schema() -> String {
    let schema = schemars::schema_for!(Report);
    let mut s = serde_json::to_string_pretty(&schema).expect("schema serialises");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn report(elapsed: f64) -> Report {
        let config = RunConfig { command: Some(CommandId::Factor), ..Default::default() };
        let checks = vec![CheckRow::new("g", Some(2.0), Some(2.0), Some(0.0), true)];
        Report::new(config, checks, json!({"g": 2.0}), Timing { elapsed_ms: elapsed, workers: 1 })
    }

    #[test]
    fn checksum_ignores_timing() {
        assert_eq!(report(1.0).checksum, report(99.0).checksum);
        assert_eq!(report(1.0).checksum.len(), 64);
    }

    #[test]
    fn informational_failures_do_not_fail_the_report() {
        let config = RunConfig { command: Some(CommandId::Factor), ..Default::default() };
        let checks = vec![
            CheckRow::new("a", None, None, None, true),
            CheckRow::new("b", None, None, None, false).informational(),
        ];
        assert!(Report::new(config, checks, json!({}), Timing { elapsed_ms: 0.0, workers: 1 }).pass);
    }

    #[test]
    fn csv_uses_seventeen_digits() {
        let csv = report(0.0).checks_csv();
        assert_eq!(csv, "check,analytic,empirical,stderr,pass\ng,2.0000000000000000e0,2.0000000000000000e0,,true\n");
    }

    #[test]
    fn non_finite_values_become_null() {
        let c = CheckRow::new("x", Some(f64::INFINITY), Some(f64::NAN), None, false);
        assert_eq!((c.analytic, c.observed), (None, None));
    }
}
