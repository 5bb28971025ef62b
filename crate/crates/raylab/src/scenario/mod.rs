//! Named batch runs: a scenario file picks a runner by `kind`, the runner
//! decodes its own `inputs`, computes tables and checks assertions.
//!
//! ```json
//! {
//!   "name": "half_interval",
//!   "kind": "bonavero",
//!   "anchor": "arithmetic volume of a half interval",
//!   "inputs": { "mode": "limit", "cases": [ ... ] },
//!   "params": { "seed": 7 }
//! }
//! ```
//!
//! Input problems (bad JSON, unknown fields, invalid geometry) are
//! [`ScenarioError::Schema`]; failures during computation are reported as
//! failed assertions so the tables written so far survive.

mod bundled;
mod output;
mod random;
mod runners;
mod cases;

use std::collections::BTreeMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub use bundled::{bundled, bundled_names, Bundled};
pub use output::{format_float, write_artifacts, Cell, Summary, Table};
pub use random::{random_hilbert_family, random_metric, random_pl_curve, HilbertFamilySpec};
pub use runners::{involution_errors, InvolutionErrors};
pub use cases::{RaySpec, ToricCase};

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("{location}: {message}")]
    Schema { location: String, message: String },
    #[error("unknown scenario kind {0:?}")]
    UnknownKind(String),
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

impl ScenarioError {
    pub fn schema(location: impl Into<String>, message: impl ToString) -> Self {
        ScenarioError::Schema { location: location.into(), message: message.to_string() }
    }
}

/// Run-wide parameters; the CLI may override `threads`, `seed` and the
/// tolerance scale.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default)]
    pub resolution: Option<f64>,
    #[serde(default)]
    pub k_list: Option<Vec<u32>>,
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub horizon: Option<f64>,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub twist_margin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub kind: String,
    #[serde(default)]
    pub anchor: String,
    #[serde(default)]
    pub description: String,
    pub inputs: serde_json::Value,
    #[serde(default)]
    pub params: Params,
}

impl Scenario {
    /// Parse a scenario, reporting syntax errors by line and column.
    pub fn parse(text: &str) -> Result<Scenario, ScenarioError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let inner = e.inner();
            let path = e.path().to_string();
            let location = if path == "." { format!("line {}, column {}", inner.line(), inner.column()) } else {
                format!("line {}, column {}, field {path}", inner.line(), inner.column())
            };
            ScenarioError::schema(location, inner)
        })
        .and_then(|s: Scenario| {
            // Names become output directory names.
            let ok = !s.name.is_empty() && s.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
            if ok {
                Ok(s)
            } else {
                Err(ScenarioError::schema("name", format!("{:?} must be nonempty and use only A-Z, a-z, 0-9, _ and -", s.name)))
            }
        })
    }

    pub fn load(path: &Path) -> Result<Scenario, ScenarioError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ScenarioError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Scenario::parse(&text)
    }

    /// Decode `inputs` into a runner's schema, reporting the failing field.
    pub fn decode_inputs<T: DeserializeOwned>(&self) -> Result<T, ScenarioError> {
        serde_path_to_error::deserialize(&self.inputs)
            .map_err(|e| ScenarioError::schema(format!("inputs.{}", e.path()), e.inner()))
    }
}

/// Settings shared by every scenario of one invocation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunContext {
    pub seed: Option<u64>,
    pub tolerance_scale: f64,
}

impl Default for RunContext {
    fn default() -> Self {
        RunContext { seed: None, tolerance_scale: 1.0 }
    }
}

impl RunContext {
    pub fn seed(&self, scenario: &Scenario) -> u64 {
        self.seed.or(scenario.params.seed).unwrap_or(0)
    }

    pub fn tolerance(&self, scenario: &Scenario, default: f64) -> f64 {
        scenario.params.tolerance.unwrap_or(default) * self.tolerance_scale
    }
}

/// One checked claim with its measured error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Assertion {
    /// Passes when `measured ≤ tolerance`.
    pub fn at_most(name: impl Into<String>, measured: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Assertion { name: name.into(), passed: measured <= tolerance, measured, tolerance, detail: detail.into() }
    }

    /// A failure raised by the computation itself.
    pub fn error(name: impl Into<String>, detail: impl ToString) -> Self {
        Assertion { name: name.into(), passed: false, measured: f64::NAN, tolerance: f64::NAN, detail: detail.to_string() }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub assertions: Vec<Assertion>,
    pub warnings: Vec<String>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }
}

/// A scenario kind.
pub trait ScenarioRunner: Send + Sync {
    fn kind(&self) -> &'static str;
    /// CSV columns of each table this kind writes, for documentation.
    fn tables(&self) -> &'static [(&'static str, &'static [&'static str])];
    /// Decode and check the inputs without computing anything.
    fn validate(&self, scenario: &Scenario) -> Result<(), ScenarioError>;
    fn run(&self, scenario: &Scenario, ctx: &RunContext) -> Result<Outcome, ScenarioError>;
}

/// Runners keyed by kind.
pub struct Registry {
    runners: BTreeMap<&'static str, Box<dyn ScenarioRunner>>,
}

impl Default for Registry {
    fn default() -> Self {
        let mut r = Registry { runners: BTreeMap::new() };
        for runner in runners::all() {
            r.register(runner);
        }
        r
    }
}

impl Registry {
    pub fn empty() -> Self {
        Registry { runners: BTreeMap::new() }
    }

    pub fn register(&mut self, runner: Box<dyn ScenarioRunner>) {
        self.runners.insert(runner.kind(), runner);
    }

    pub fn kinds(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.runners.keys().copied()
    }

    pub fn get(&self, kind: &str) -> Result<&dyn ScenarioRunner, ScenarioError> {
        self.runners.get(kind).map(|r| r.as_ref()).ok_or_else(|| ScenarioError::UnknownKind(kind.to_string()))
    }

    pub fn validate(&self, scenario: &Scenario) -> Result<(), ScenarioError> {
        self.get(&scenario.kind)?.validate(scenario)
    }

    /// Validate, then run.
    pub fn run(&self, scenario: &Scenario, ctx: &RunContext) -> Result<Outcome, ScenarioError> {
        let runner = self.get(&scenario.kind)?;
        runner.validate(scenario)?;
        runner.run(scenario, ctx)
    }
}
