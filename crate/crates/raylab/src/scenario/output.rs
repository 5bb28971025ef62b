use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{Assertion, Outcome, Scenario, ScenarioError};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

/// Fixed scientific notation with 12 digits after the point; `inf`, `-inf`
/// and `nan` spelled out.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else if x == 0.0 {
        // Normalizes −0.
        format!("{:.12e}", 0.0)
    } else {
        format!("{x:.12e}")
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format_float(*x),
            Cell::Text(s) => s.clone(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(i) => Some(*i as f64),
            Cell::Float(x) => Some(*x),
            Cell::Text(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Column lookup on the last row.
    pub fn last(&self, column: &str) -> Option<&Cell> {
        let i = self.columns.iter().position(|c| c == column)?;
        self.rows.last().map(|r| &r[i])
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::render)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }
}

/// Machine-readable result of one scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub scenario: String,
    pub kind: String,
    pub anchor: String,
    pub passed: bool,
    pub seed: u64,
    pub tolerance_scale: f64,
    pub assertions: Vec<Assertion>,
    pub tables: Vec<String>,
    pub warnings: Vec<String>,
}

impl Summary {
    pub fn new(scenario: &Scenario, outcome: &Outcome, seed: u64, tolerance_scale: f64) -> Self {
        Summary {
            scenario: scenario.name.clone(),
            kind: scenario.kind.clone(),
            anchor: scenario.anchor.clone(),
            passed: outcome.passed(),
            seed,
            tolerance_scale,
            assertions: outcome.assertions.clone(),
            tables: outcome.tables.iter().map(|t| format!("{}.csv", t.name)).collect(),
            warnings: outcome.warnings.clone(),
        }
    }
}

/// Write `<out>/<scenario>/<table>.csv` and `summary.json`; returns the
/// scenario directory.
pub fn write_artifacts(out: &Path, summary: &Summary, outcome: &Outcome) -> Result<PathBuf, ScenarioError> {
    let dir = out.join(&summary.scenario);
    let io = |p: &Path, e: std::io::Error| ScenarioError::Io { path: p.display().to_string(), message: e.to_string() };
    std::fs::create_dir_all(&dir).map_err(|e| io(&dir, e))?;
    for t in &outcome.tables {
        let p = dir.join(format!("{}.csv", t.name));
        std::fs::write(&p, t.to_csv()).map_err(|e| io(&p, e))?;
    }
    let p = dir.join("summary.json");
    let mut text = serde_json::to_string_pretty(summary).expect("summary serializes");
    text.push('\n');
    std::fs::write(&p, text).map_err(|e| io(&p, e))?;
    Ok(dir)
}
