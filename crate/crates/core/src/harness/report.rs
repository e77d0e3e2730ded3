//! Verification reports and their CSV / JSON renderings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::Verdict;

/// Column order of the CSV rendering.
pub const CSV_HEADER: [&str; 9] = [
    "suite",
    "check",
    "anchor",
    "statistic",
    "target",
    "tolerance",
    "se",
    "n_reps",
    "pass",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub suite: String,
    pub check: String,
    pub anchor: String,
    pub statistic: f64,
    pub target: f64,
    pub tolerance: f64,
    pub se: f64,
    pub n_reps: usize,
    pub pass: bool,
}

impl Row {
    pub fn new(suite: &str, check: impl Into<String>, anchor: &str, v: Verdict) -> Self {
        Row {
            suite: suite.to_string(),
            check: check.into(),
            anchor: anchor.to_string(),
            statistic: v.statistic,
            target: v.target,
            tolerance: v.tolerance,
            se: v.se,
            n_reps: v.n_reps,
            pass: v.passed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Environment {
    pub master_seed: u64,
    pub n_reps: usize,
    pub version: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::config("--format", format!("expected csv or json, got `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub environment: Environment,
    pub summary: Summary,
    pub rows: Vec<Row>,
}

impl Report {
    pub fn new(environment: Environment, rows: Vec<Row>) -> Self {
        let passed = rows.iter().filter(|r| r.pass).count();
        Report {
            environment,
            summary: Summary {
                total: rows.len(),
                passed,
                failed: rows.len() - passed,
            },
            rows,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    /// Whether the summary counts match the rows.
    pub fn is_consistent(&self) -> bool {
        let passed = self.rows.iter().filter(|r| r.pass).count();
        self.summary
            == Summary {
                total: self.rows.len(),
                passed,
                failed: self.rows.len() - passed,
            }
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>> {
        match format {
            Format::Json => {
                let mut out = serde_json::to_vec_pretty(self)?;
                out.push(b'\n');
                Ok(out)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(CSV_HEADER)?;
                for r in &self.rows {
                    w.write_record([
                        r.suite.clone(),
                        r.check.clone(),
                        r.anchor.clone(),
                        r.statistic.to_string(),
                        r.target.to_string(),
                        r.tolerance.to_string(),
                        r.se.to_string(),
                        r.n_reps.to_string(),
                        if r.pass { "1" } else { "0" }.to_string(),
                    ])?;
                }
                w.into_inner().map_err(|e| Error::Io(e.into_error()))
            }
        }
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let report: Report = serde_json::from_slice(bytes)?;
        if !report.is_consistent() {
            return Err(Error::config("summary", "summary counts disagree with the rows"));
        }
        Ok(report)
    }

    /// Parses the CSV rendering; CSV carries no environment, so the given one is attached.
    pub fn from_csv(bytes: &[u8], environment: Environment) -> Result<Self> {
        let mut r = csv::Reader::from_reader(bytes);
        let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        if header != CSV_HEADER {
            return Err(Error::config("<header>", format!("unexpected CSV columns {header:?}")));
        }
        let mut rows = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let num = |k: usize| -> Result<f64> {
                rec[k]
                    .parse()
                    .map_err(|_| Error::config(format!("rows[{i}].{}", CSV_HEADER[k]), format!("`{}` is not a number", &rec[k])))
            };
            rows.push(Row {
                suite: rec[0].to_string(),
                check: rec[1].to_string(),
                anchor: rec[2].to_string(),
                statistic: num(3)?,
                target: num(4)?,
                tolerance: num(5)?,
                se: num(6)?,
                n_reps: rec[7]
                    .parse()
                    .map_err(|_| Error::config(format!("rows[{i}].n_reps"), "not a count"))?,
                pass: match &rec[8] {
                    "1" => true,
                    "0" => false,
                    other => return Err(Error::config(format!("rows[{i}].pass"), format!("expected 1 or 0, got `{other}`"))),
                },
            });
        }
        Ok(Report::new(environment, rows))
    }
}
