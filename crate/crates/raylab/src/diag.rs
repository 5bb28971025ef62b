//! Non-fatal diagnostics attached to numerical estimates.

use serde::Serialize;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum Warning {
    /// A family expected to be positive failed a sampled convexity check.
    Positivity(String),
    /// Successive horizons or resolutions disagree by more than the tolerance.
    Convergence(String),
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::Positivity(d) => write!(f, "positivity: {d}"),
            Warning::Convergence(d) => write!(f, "convergence: {d}"),
        }
    }
}

/// A scalar estimate together with whatever went wrong while computing it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub warnings: Vec<Warning>,
}

impl Estimate {
    pub fn clean(value: f64) -> Self {
        Estimate { value, warnings: Vec::new() }
    }

    pub fn is_clean(&self) -> bool {
        self.warnings.is_empty()
    }
}
