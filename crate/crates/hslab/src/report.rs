use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Paper,
    Trivial,
    Derived,
    Heuristic,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::Paper => "paper",
            Provenance::Trivial => "trivial",
            Provenance::Derived => "derived",
            Provenance::Heuristic => "heuristic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// One named value or check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
    /// Relative deviation from `reference`, or a margin for inequality checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deviation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub passed: Option<bool>,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Table>,
}

/// JSON cannot hold NaN or infinities.
fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

impl Record {
    pub fn value(name: impl Into<String>, value: f64, provenance: Provenance) -> Self {
        Record {
            name: name.into(),
            value: finite(value),
            reference: None,
            deviation: None,
            passed: None,
            provenance,
            note: None,
            table: None,
        }
    }

    /// Check `value` against `reference` to relative tolerance `tol`.
    pub fn compare(name: impl Into<String>, value: f64, reference: f64, tol: f64, provenance: Provenance) -> Self {
        let dev = (value / reference - 1.0).abs();
        Record { reference: finite(reference), deviation: finite(dev), passed: Some(dev <= tol), ..Self::value(name, value, provenance) }
    }

    pub fn check(name: impl Into<String>, passed: bool, provenance: Provenance) -> Self {
        Record { passed: Some(passed), ..Self::value(name, f64::NAN, provenance) }
    }

    pub fn failure(name: impl Into<String>, provenance: Provenance, err: impl std::fmt::Display) -> Self {
        Self::check(name, false, provenance).with_note(err.to_string())
    }

    pub fn with_value(mut self, v: f64) -> Self {
        self.value = finite(v);
        self
    }

    pub fn with_deviation(mut self, v: f64) -> Self {
        self.deviation = finite(v);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    pub fn failed(&self) -> bool {
        self.passed == Some(false)
    }
}

/// Parameters echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub n: u32,
    pub p: f64,
    pub gamma: f64,
    pub theta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub grid_size: usize,
    pub tol: f64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
    pub kind: String,
    pub samples: u64,
}

impl From<&RunConfig> for Params {
    fn from(c: &RunConfig) -> Self {
        Params {
            n: c.n,
            p: c.p,
            gamma: c.gamma,
            theta: c.theta,
            alpha: c.alpha,
            grid_size: c.grid_size,
            tol: c.tol,
            seed: c.seed,
            case: c.case.clone(),
            kind: c.kind.name().to_string(),
            samples: c.samples,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub params: Params,
    pub results: Vec<Record>,
    pub passed: bool,
    pub version: String,
}

impl Report {
    /// `passed` is false iff some record failed.
    pub fn new(config: &RunConfig, results: Vec<Record>) -> Self {
        Report {
            command: config.command.name().to_string(),
            params: Params::from(config),
            passed: !results.iter().any(Record::failed),
            results,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}
