//! Check records, result tables and their CSV/JSON serialization.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// Reported quantity without a threshold.
    Info,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "info")]
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub threshold: Option<f64>,
    pub verdict: Verdict,
}

impl Record {
    /// Passes iff `value ≤ threshold`; NaN fails.
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self::compared(name, value, Relation::AtMost, threshold, value <= threshold)
    }

    /// Passes iff `value ≥ threshold`; NaN fails.
    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self::compared(name, value, Relation::AtLeast, threshold, value >= threshold)
    }

    /// A boolean check, recorded as 1 (true) against threshold 1.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::compared(name, if ok { 1.0 } else { 0.0 }, Relation::AtLeast, 1.0, ok)
    }

    pub fn info(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            value,
            relation: Relation::None,
            threshold: None,
            verdict: Verdict::Info,
        }
    }

    fn compared(name: impl Into<String>, value: f64, relation: Relation, threshold: f64, ok: bool) -> Self {
        Self {
            name: name.into(),
            value,
            relation,
            threshold: Some(threshold),
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }
}

/// A rectangular result table; cells are preformatted so CSV output is exact.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Shortest round-trip decimal form, identical on every platform.
pub fn cell(v: f64) -> String {
    format!("{v:e}")
}

/// What an experiment produces.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub records: Vec<Record>,
    pub table: Table,
    /// Free-form structured output (witnesses, fitted parameters, ...).
    pub details: serde_json::Value,
}

impl Outcome {
    pub fn with_table(columns: &[&str]) -> Self {
        Self {
            table: Table::new(columns),
            ..Self::default()
        }
    }

    pub fn push(&mut self, record: Record) {
        self.records.push(record);
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub version: String,
    pub config: BTreeMap<String, String>,
    pub records: Vec<Record>,
    pub table: Table,
    pub details: serde_json::Value,
    pub wall_time_seconds: f64,
    pub passed: bool,
}

impl ExperimentReport {
    pub fn new(experiment: &str, config: BTreeMap<String, String>, outcome: Outcome, wall_time_seconds: f64) -> Self {
        let passed = outcome.records.iter().all(Record::passed);
        Self {
            experiment: experiment.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            records: outcome.records,
            table: outcome.table,
            details: outcome.details,
            wall_time_seconds,
            passed,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| !r.passed())
    }

    /// The checks as CSV: `name,value,relation,threshold,verdict`.
    pub fn checks_csv(&self) -> CliResult<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["name", "value", "relation", "threshold", "verdict"])?;
        for r in &self.records {
            let relation = match r.relation {
                Relation::AtMost => "<=",
                Relation::AtLeast => ">=",
                Relation::None => "info",
            };
            let verdict = match r.verdict {
                Verdict::Pass => "pass",
                Verdict::Fail => "fail",
                Verdict::Info => "info",
            };
            w.write_record([
                r.name.as_str(),
                &cell(r.value),
                relation,
                &r.threshold.map(cell).unwrap_or_default(),
                verdict,
            ])?;
        }
        finish(w)
    }

    pub fn table_csv(&self) -> CliResult<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.table.columns)?;
        for row in &self.table.rows {
            w.write_record(row)?;
        }
        finish(w)
    }

    pub fn to_json(&self) -> CliResult<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Writes `<name>.csv` (the table, when nonempty), `<name>_checks.csv`
    /// and `<name>.json` into `dir`, creating it if needed.
    pub fn write(&self, dir: &Path) -> CliResult<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.display().to_string(), e))?;
        let mut files = Vec::new();
        let mut put = |name: String, body: String| -> CliResult<()> {
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(|e| CliError::Io(path.display().to_string(), e))?;
            files.push(path);
            Ok(())
        };
        if !self.table.is_empty() {
            put(format!("{}.csv", self.experiment), self.table_csv()?)?;
        }
        put(format!("{}_checks.csv", self.experiment), self.checks_csv()?)?;
        put(format!("{}.json", self.experiment), self.to_json()?)?;
        Ok(files)
    }
}

fn finish(w: csv::Writer<Vec<u8>>) -> CliResult<String> {
    let bytes = w.into_inner().map_err(|e| CliError::Config(format!("csv buffer: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts() {
        assert!(Record::at_most("a", 1.0, 1.0).passed());
        assert!(!Record::at_most("a", f64::NAN, 1.0).passed());
        assert!(!Record::at_least("a", 0.5, 1.0).passed());
        assert!(Record::info("a", f64::NAN).passed());
        assert!(!Record::holds("a", false).passed());
    }

    #[test]
    fn csv_layout() {
        let mut outcome = Outcome::default();
        outcome.push(Record::at_most("defect", 1e-13, 1e-12));
        outcome.table = Table::new(&["n", "ratio"]);
        outcome.table.push(vec!["4".into(), cell(0.1)]);
        let r = ExperimentReport::new("x", BTreeMap::new(), outcome, 0.0);
        assert_eq!(r.checks_csv().unwrap(), "name,value,relation,threshold,verdict\ndefect,1e-13,<=,1e-12,pass\n");
        assert_eq!(r.table_csv().unwrap(), "n,ratio\n4,1e-1\n");
        let json: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(json["records"][0]["verdict"], "pass");
        assert_eq!(json["passed"], true);
    }
}
