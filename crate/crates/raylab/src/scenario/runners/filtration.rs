use std::sync::Arc;

use serde::Deserialize;

use super::{fmax, Outcome};
use crate::raycurve::{check_ray, default_t_grid, from_filtration, mass_curve, ray_energy_slope, ToricFiltration};
use crate::scenario::{Assertion, RunContext, Scenario, ScenarioError, ScenarioRunner, Table};
use crate::toric::{Grid, PieceJson, Polytope, PolytopeJson, PotentialJson};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Inputs {
    polytope: PolytopeJson,
    k: u32,
    /// `λ_α` listed in the lexicographic order of `kP ∩ Z^n`.
    #[serde(default)]
    weights: Option<Vec<f64>>,
    /// `λ_α = k · f(α/k)` for a max-affine `f`.
    #[serde(default)]
    weight_pieces: Option<Vec<PieceJson>>,
    #[serde(default)]
    resolution: Option<f64>,
}

pub struct FiltrationCurve;

impl FiltrationCurve {
    fn decode(scenario: &Scenario) -> Result<(Inputs, Arc<Polytope>, ToricFiltration), ScenarioError> {
        let inputs: Inputs = scenario.decode_inputs()?;
        let poly = Arc::new(inputs.polytope.build().map_err(|e| ScenarioError::schema("inputs.polytope", e))?);
        if inputs.k == 0 || inputs.k > 256 {
            return Err(ScenarioError::schema("inputs.k", "k must lie in [1, 256]"));
        }
        let filtration = match (&inputs.weights, &inputs.weight_pieces) {
            (Some(w), None) => {
                let points = poly.lattice_points(inputs.k);
                if w.len() != points.len() {
                    return Err(ScenarioError::schema("inputs.weights", format!("expected {} weights", points.len())));
                }
                ToricFiltration { k: inputs.k, points, weights: w.clone() }
            }
            (None, Some(pieces)) => {
                let f = PotentialJson { g_pl_pieces: Some(pieces.clone()), ..Default::default() }
                    .pieces(poly.dim())
                    .map_err(|e| ScenarioError::schema("inputs.weight_pieces", e))?
                    .expect("pieces given");
                ToricFiltration::from_fn(&poly, inputs.k, |a, k| {
                    let p: Vec<f64> = a.iter().map(|x| *x as f64 / k as f64).collect();
                    k as f64 * f.eval(&p)
                })
            }
            _ => return Err(ScenarioError::schema("inputs", "give exactly one of weights, weight_pieces")),
        };
        Ok((inputs, poly, filtration))
    }
}

impl ScenarioRunner for FiltrationCurve {
    fn kind(&self) -> &'static str {
        "filtration_curve"
    }

    fn tables(&self) -> &'static [(&'static str, &'static [&'static str])] {
        &[("mass_curve", &["tau", "mass"]), ("energy", &["method", "value"])]
    }

    fn validate(&self, scenario: &Scenario) -> Result<(), ScenarioError> {
        let (_, poly, w) = Self::decode(scenario)?;
        let grid = Arc::new(Grid::new(&poly, 1.0));
        from_filtration(&poly, &grid, &w).map(|_| ()).map_err(|e| ScenarioError::schema("inputs", e))
    }

    fn run(&self, scenario: &Scenario, ctx: &RunContext) -> Result<Outcome, ScenarioError> {
        let (inputs, poly, w) = Self::decode(scenario)?;
        let grid = Arc::new(match inputs.resolution.or(scenario.params.resolution) {
            Some(r) => Grid::new(&poly, r),
            None => Grid::default_for(&poly),
        });
        let curve = from_filtration(&poly, &grid, &w).map_err(|e| ScenarioError::schema("inputs", e))?;
        let tol = ctx.tolerance(scenario, 5e-3);
        let mut out = Outcome::default();
        let (lo, hi) = (curve.tau_minus(), curve.tau_plus());
        let taus: Vec<f64> = (0..=64).map(|i| lo - 0.25 + (hi - lo + 0.5) * i as f64 / 64.0).collect();
        let mut mc = Table::new("mass_curve", self.tables()[0].1);
        match mass_curve(&curve, &taus) {
            Ok(rows) => {
                let rise = rows.windows(2).map(|w| w[1].1 - w[0].1).fold(0.0f64, fmax);
                let v = poly.total_mass();
                let below = rows.iter().filter(|(t, _)| *t <= lo).map(|(_, m)| (m - v).abs()).fold(0.0f64, fmax);
                for (t, m) in &rows {
                    mc.push(vec![(*t).into(), (*m).into()]);
                }
                out.assertions.push(Assertion::at_most("mass_nonincreasing", rise, 1e-12, "largest increase of the mass along τ"));
                out.assertions.push(Assertion::at_most("full_mass_below_tau_minus", below, 1e-12, "mass at τ ≤ τ⁻ against vol"));
            }
            Err(e) => out.assertions.push(Assertion::error("mass_curve", e)),
        }
        out.tables.push(mc);
        let horizon = scenario.params.horizon.unwrap_or(16.0);
        match check_ray(&curve, &default_t_grid(horizon)).and_then(|r| ray_energy_slope(&r)) {
            Ok(rep) => {
                let mut t = Table::new("energy", self.tables()[1].1);
                for (m, v) in &rep.values {
                    t.push(vec![m.as_str().into(), (*v).into()]);
                }
                out.tables.push(t);
                out.assertions.push(Assertion::at_most("energy_methods_agree", rep.max_deviation, tol, "radial energy of the check ray"));
            }
            Err(e) => out.assertions.push(Assertion::error("energy", e)),
        }
        Ok(out)
    }
}
