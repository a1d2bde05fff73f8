//! Report types and their JSON / CSV serialization.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

pub const REPORT_SCHEMA: &str = "instanton-lab/report/1";

/// Acceptance rule for one numeric entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Criterion {
    AtMost { tolerance: f64 },
    AtLeast { threshold: f64 },
    Within { low: f64, high: f64 },
    Equals { expected: f64 },
}

impl Criterion {
    pub fn accepts(&self, v: f64) -> bool {
        match *self {
            Criterion::AtMost { tolerance } => v <= tolerance,
            Criterion::AtLeast { threshold } => v >= threshold,
            Criterion::Within { low, high } => low <= v && v <= high,
            Criterion::Equals { expected } => v == expected,
        }
    }

    fn describe(&self) -> String {
        match *self {
            Criterion::AtMost { tolerance } => format!("<= {tolerance:e}"),
            Criterion::AtLeast { threshold } => format!(">= {threshold:e}"),
            Criterion::Within { low, high } => format!("in [{low}, {high}]"),
            Criterion::Equals { expected } => format!("== {expected}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// `None` when the quantity could not be computed (non-finite value).
    pub value: Option<f64>,
    pub criterion: Criterion,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, criterion: Criterion) -> Self {
        let finite = value.is_finite();
        Self {
            name: name.into(),
            value: finite.then_some(value),
            criterion,
            passed: finite && criterion.accepts(value),
        }
    }
}

/// Rectangular table, also emitted as CSV.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SuiteRecord {
    pub passed: bool,
    pub checks: Vec<Check>,
    pub tables: BTreeMap<String, Table>,
    /// Structured by-products: fits, verdicts, recorded constants.
    pub data: BTreeMap<String, Value>,
    /// Set when a precondition failed and the suite stopped early.
    pub error: Option<String>,
}

impl SuiteRecord {
    pub fn check(&mut self, name: impl Into<String>, value: f64, criterion: Criterion) {
        self.checks.push(Check::new(name, value, criterion));
    }

    pub fn record(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.data.insert(key.to_string(), v);
    }

    pub fn finish(mut self) -> Self {
        self.passed = self.error.is_none() && !self.checks.is_empty() && self.checks.iter().all(|c| c.passed);
        self
    }

    pub fn failed(partial: SuiteRecord, error: String) -> Self {
        SuiteRecord { error: Some(error), passed: false, ..partial }
    }
}

/// Conventions fixed where the underlying construction leaves a choice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub exponent: f64,
    pub potential: String,
    pub residue_normalization: String,
    pub k_rule: String,
    pub kappa: String,
    pub triple_constant: String,
    pub reflection: String,
    pub period_condition: String,
}

impl Conventions {
    pub fn for_config(cfg: &RunConfig) -> Self {
        Self {
            exponent: cfg.exponent,
            potential: "phi = (2/3) t^p with t = -log |w|^2_h".into(),
            residue_normalization: "|f|^2 = 2 pi b / Im tau, f = -i |f|".into(),
            k_rule: "k = b".into(),
            kappa: "kappa fixed by int_C (kappa/u) dv ^ du = 1, C oriented by (Re v, arg u); kappa = -i/(2 pi)".into(),
            triple_constant: "ratio 2 omega^2 / (Omega ^ conj Omega) recorded per family; rotation requires 1".into(),
            reflection: "s_a(x) = x + <a, x> a".into(),
            period_condition: "periods compared on a basis of the classes orthogonal to every fibre component".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub version: String,
    pub command: String,
    pub timestamp: Option<String>,
    pub config: RunConfig,
    pub conventions: Conventions,
    pub suites: BTreeMap<String, SuiteRecord>,
    pub passed: bool,
}

impl Report {
    pub fn new(command: &str, cfg: &RunConfig, suites: BTreeMap<String, SuiteRecord>) -> Self {
        let passed = !suites.is_empty() && suites.values().all(|s| s.passed);
        Self {
            schema: REPORT_SCHEMA.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            timestamp: cfg.resolved_timestamp(),
            config: cfg.clone(),
            conventions: Conventions::for_config(cfg),
            suites,
            passed,
        }
    }

    pub fn to_json(&self) -> CliResult<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| CliError::Serialize(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    /// One line per check, for terminal output.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for (name, suite) in &self.suites {
            out.push_str(&format!("[{}] {name}\n", if suite.passed { "PASS" } else { "FAIL" }));
            if let Some(e) = &suite.error {
                out.push_str(&format!("    error: {e}\n"));
            }
            for c in &suite.checks {
                let v = c.value.map_or("n/a".to_string(), |v| format!("{v:.6e}"));
                let mark = if c.passed { "ok  " } else { "FAIL" };
                out.push_str(&format!("    {mark} {:<40} {v} {}\n", c.name, c.criterion.describe()));
            }
        }
        out
    }

    /// Writes `checks.csv` and one `<suite>_<table>.csv` per table into `dir`.
    pub fn write_csv(&self, dir: &Path) -> CliResult<Vec<String>> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        let mut written = Vec::new();
        let mut checks = Table::new(&["suite", "check", "value", "criterion", "passed"]);
        for (name, suite) in &self.suites {
            for c in &suite.checks {
                checks.push(vec![
                    Value::from(name.as_str()),
                    Value::from(c.name.as_str()),
                    c.value.map_or(Value::Null, Value::from),
                    Value::from(c.criterion.describe()),
                    Value::from(c.passed),
                ]);
            }
        }
        write_table(&dir.join("checks.csv"), &checks)?;
        written.push("checks.csv".to_string());
        for (name, suite) in &self.suites {
            for (tname, table) in &suite.tables {
                let file = format!("{name}_{tname}.csv");
                write_table(&dir.join(&file), table)?;
                written.push(file);
            }
        }
        Ok(written)
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn write_table(path: &Path, table: &Table) -> CliResult<()> {
    let io = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(&table.columns).map_err(io)?;
    for row in &table.rows {
        w.write_record(row.iter().map(cell)).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
