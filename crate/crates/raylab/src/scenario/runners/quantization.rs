use serde::Deserialize;

use super::{fmax, Outcome};
use crate::quantize::{d1k, lk, HilbertOptions};
use crate::scenario::{Assertion, RunContext, Scenario, ScenarioError, ScenarioRunner, Table, ToricCase};
use crate::toric::{factorial, DualPotential, PotentialJson};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Inputs {
    case: ToricCase,
    k_list: Vec<u32>,
    /// Second potential for the distance comparison; the reference when absent.
    #[serde(default)]
    compare_to: Option<PotentialJson>,
}

pub struct Quantization;

impl Quantization {
    fn decode(scenario: &Scenario) -> Result<Inputs, ScenarioError> {
        let inputs: Inputs = scenario.decode_inputs()?;
        let (p, g, _) = inputs.case.build(Some(1.0), "inputs.case")?;
        if p.dim() != 1 {
            return Err(ScenarioError::schema("inputs.case.polytope", "Hilbert maps are available in dimension one only"));
        }
        if let Some(v) = &inputs.compare_to {
            v.build(&p, &g).map_err(|e| ScenarioError::schema("inputs.compare_to", e))?;
        }
        if inputs.k_list.is_empty() || inputs.k_list.iter().any(|k| *k == 0 || *k > 4096) {
            return Err(ScenarioError::schema("inputs.k_list", "k_list must be nonempty with 1 ≤ k ≤ 4096"));
        }
        Ok(inputs)
    }
}

impl ScenarioRunner for Quantization {
    fn kind(&self) -> &'static str {
        "quantization"
    }

    fn tables(&self) -> &'static [(&'static str, &'static [&'static str])] {
        &[("quantization", &["k", "lk_normalized", "energy", "relative_error", "d1k", "d1", "d1_gap"])]
    }

    fn validate(&self, scenario: &Scenario) -> Result<(), ScenarioError> {
        Self::decode(scenario).map(|_| ())
    }

    fn run(&self, scenario: &Scenario, ctx: &RunContext) -> Result<Outcome, ScenarioError> {
        let inputs = Self::decode(scenario)?;
        let tol = ctx.tolerance(scenario, 0.05);
        let (p, g, u) = inputs.case.build(scenario.params.resolution, "inputs.case")?;
        let v = match &inputs.compare_to {
            Some(j) => j.build(&p, &g).map_err(|e| ScenarioError::schema("inputs.compare_to", e))?,
            None => DualPotential::reference(&p, &g),
        };
        let opts = HilbertOptions::default();
        let energy = u.energy_i();
        let d1 = u.d1_distance(&v).map_err(|e| ScenarioError::schema("inputs", e))?;
        let mut out = Outcome::default();
        let mut table = Table::new("quantization", self.tables()[0].1);
        let mut worst = 0.0f64;
        let mut gaps = Vec::new();
        for &k in &inputs.k_list {
            match (lk(&u, k, &opts), d1k(&u, &v, k, &opts)) {
                (Ok(l), Ok(dk)) => {
                    let norm = factorial(1) / k as f64 * l;
                    let rel = (norm - energy).abs() / energy.abs().max(1e-300);
                    worst = fmax(worst, rel);
                    gaps.push((dk - d1).abs());
                    table.push(vec![k.into(), norm.into(), energy.into(), rel.into(), dk.into(), d1.into(), (dk - d1).abs().into()]);
                }
                (Err(e), _) | (_, Err(e)) => out.assertions.push(Assertion::error(format!("k{k}"), e)),
            }
        }
        let increase = gaps.windows(2).map(|w| w[1] - w[0]).fold(0.0f64, fmax);
        out.assertions.push(Assertion::at_most("lk_matches_energy", worst, tol, "max relative error of (1/k) L_k against I(u)"));
        out.assertions.push(Assertion::at_most("d1k_gap_nonincreasing", increase, 1e-12, "largest increase of |d1k − d1| along k_list"));
        out.tables.push(table);
        Ok(out)
    }
}
