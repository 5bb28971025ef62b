use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fmax, Outcome};
use crate::raycurve::{check_ray, hat_curve, hat_transform, ray_energy_slope, RayError, TestCurve};
use crate::scenario::random::random_pl_curve;
use crate::scenario::{Assertion, RaySpec, RunContext, Scenario, ScenarioError, ScenarioRunner, Table};
use crate::toric::{DualPotential, Grid, Polytope};

fn default_horizon() -> f64 {
    16.0
}

fn default_step() -> f64 {
    1.0 / 64.0
}

fn default_t_max() -> f64 {
    4.0
}

#[derive(Debug, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
enum Inputs {
    /// Radial energy of linear rays by every registered method.
    Energy {
        rays: Vec<RaySpec>,
        #[serde(default = "default_horizon")]
        horizon: f64,
    },
    /// Random piecewise-linear test curves through both Legendre transforms.
    Involution {
        curves_1d: usize,
        curves_2d: usize,
        #[serde(default = "default_step")]
        resolution: f64,
        #[serde(default = "default_step")]
        tau_step: f64,
        #[serde(default = "default_t_max")]
        t_max: f64,
    },
}

/// Sup errors of `hat ∘ check` against the curve and of `check ∘ hat`
/// against the ray `check(curve)`, the latter divided by `max(1, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvolutionErrors {
    pub hat_check: f64,
    pub check_hat: f64,
}

fn t_grid(t_max: f64) -> Vec<f64> {
    let n = (t_max * 4.0).round() as usize;
    (0..=n).map(|i| i as f64 / 4.0).collect()
}

fn excess_ok(u: &DualPotential, p: &[f64], margin: f64) -> bool {
    u.body().excess(p) <= -margin
}

fn compare(a: &DualPotential, b: &DualPotential, margin: f64) -> f64 {
    let grid = a.grid();
    let mut err = 0.0f64;
    for v in a.body().vertices() {
        err = fmax(err, b.body().excess(&v).max(0.0));
    }
    for v in b.body().vertices() {
        err = fmax(err, a.body().excess(&v).max(0.0));
    }
    for i in 0..grid.len() {
        let (x, y) = (a.values()[i], b.values()[i]);
        if x.is_finite() && y.is_finite() {
            let p = grid.node(i);
            if excess_ok(a, &p, margin) && excess_ok(b, &p, margin) {
                err = fmax(err, (x - y).abs());
            }
        }
    }
    err
}

fn diameter(u: &DualPotential) -> f64 {
    let v = u.body().vertices();
    let mut d = 0.0f64;
    for a in &v {
        for b in &v {
            d = d.max(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt());
        }
    }
    d
}

/// Round trips through the Legendre transforms, compared on relative
/// interiors (nodes at distance at least one grid step from the boundary).
pub fn involution_errors(curve: &TestCurve, t_max: f64, tau_step: f64) -> Result<InvolutionErrors, RayError> {
    let h = curve.grid().resolution();
    let ts = t_grid(t_max);
    let ray = check_ray(curve, &ts)?;
    let (lo, hi) = (curve.tau_minus(), curve.tau_plus());
    let mut hat_check = 0.0f64;
    for i in 0..=8 {
        let tau = (lo - 0.25) + (hi - tau_step - (lo - 0.25)) * i as f64 / 8.0;
        match (hat_transform(&ray, tau)?, curve.at(tau)?) {
            (Some(a), Some(b)) => hat_check = fmax(hat_check, compare(&a, &b, h)),
            (Some(x), None) | (None, Some(x)) => hat_check = fmax(hat_check, diameter(&x)),
            (None, None) => {}
        }
    }
    let n = ((hi - lo) / tau_step).ceil() as usize + 2;
    let taus: Vec<f64> = (0..=n).map(|i| lo - tau_step + i as f64 * tau_step).collect();
    let curve2 = hat_curve(&ray, &taus)?;
    let ray2 = check_ray(&curve2, &[0.0, 0.5, 1.0, 2.0, t_max])?;
    let poly = curve.polytope();
    let mut check_hat = 0.0f64;
    for &t in &[0.5, 1.0, 2.0, t_max] {
        let (a, b) = (ray.at(t)?, ray2.at(t)?);
        for i in 0..a.grid().len() {
            let p = a.grid().node(i);
            if a.grid().in_polytope(i) && poly.body().excess(&p) <= -h {
                check_hat = fmax(check_hat, (a.values()[i] - b.values()[i]).abs() / t.max(1.0));
            }
        }
    }
    Ok(InvolutionErrors { hat_check, check_hat })
}

pub struct EnergyDuality;

impl EnergyDuality {
    fn decode(scenario: &Scenario) -> Result<Inputs, ScenarioError> {
        let inputs: Inputs = scenario.decode_inputs()?;
        match &inputs {
            Inputs::Energy { rays, horizon } => {
                if rays.is_empty() {
                    return Err(ScenarioError::schema("inputs.rays", "at least one ray is required"));
                }
                for (i, r) in rays.iter().enumerate() {
                    r.build(Some(1.0), *horizon, &format!("inputs.rays[{i}]"))?;
                }
            }
            Inputs::Involution { curves_1d, curves_2d, resolution, tau_step, t_max } => {
                if curves_1d + curves_2d == 0 {
                    return Err(ScenarioError::schema("inputs", "no curves requested"));
                }
                if !(*resolution > 0.0 && *resolution <= 0.25 && *tau_step > 0.0 && *tau_step <= 0.25) {
                    return Err(ScenarioError::schema("inputs", "resolution and tau_step must lie in (0, 1/4]"));
                }
                if !(*t_max >= 2.0 && *t_max <= 64.0) {
                    return Err(ScenarioError::schema("inputs.t_max", "t_max must lie in [2, 64]"));
                }
            }
        }
        Ok(inputs)
    }
}

impl ScenarioRunner for EnergyDuality {
    fn kind(&self) -> &'static str {
        "energy_duality"
    }

    fn tables(&self) -> &'static [(&'static str, &'static [&'static str])] {
        &[
            ("energy", &["ray", "method", "value", "target", "error"]),
            ("curves", &["curve", "dim", "tau_minus", "tau_plus", "hat_check_error", "check_hat_error", "bound"]),
        ]
    }

    fn validate(&self, scenario: &Scenario) -> Result<(), ScenarioError> {
        Self::decode(scenario).map(|_| ())
    }

    fn run(&self, scenario: &Scenario, ctx: &RunContext) -> Result<Outcome, ScenarioError> {
        let mut out = Outcome::default();
        match Self::decode(scenario)? {
            Inputs::Energy { rays, horizon } => {
                let tol = ctx.tolerance(scenario, 5e-3);
                let horizon = scenario.params.horizon.unwrap_or(horizon);
                let mut table = Table::new("energy", self.tables()[0].1);
                for (i, spec) in rays.iter().enumerate() {
                    let ray = spec.build(scenario.params.resolution, horizon, &format!("inputs.rays[{i}]"))?;
                    let report = match ray_energy_slope(&ray) {
                        Ok(r) => r,
                        Err(e) => {
                            out.assertions.push(Assertion::error(format!("{}_energy", spec.name), e));
                            continue;
                        }
                    };
                    let expected = spec.expected(&format!("inputs.rays[{i}]"))?;
                    let mut worst = 0.0f64;
                    for (m, v) in &report.values {
                        let (target, err) = match expected {
                            Some(x) => (x, (v - x).abs()),
                            None => (f64::NAN, f64::NAN),
                        };
                        if expected.is_some() {
                            worst = fmax(worst, err);
                        }
                        table.push(vec![spec.name.as_str().into(), m.as_str().into(), (*v).into(), target.into(), err.into()]);
                    }
                    out.assertions.push(Assertion::at_most(
                        format!("{}_methods_agree", spec.name),
                        report.max_deviation,
                        tol,
                        "max pairwise difference between methods",
                    ));
                    if let Some(x) = expected {
                        out.assertions.push(Assertion::at_most(format!("{}_expected", spec.name), worst, tol, format!("expected {x}")));
                    }
                }
                out.tables.push(table);
            }
            Inputs::Involution { curves_1d, curves_2d, resolution, tau_step, t_max } => {
                let bound = ctx.tolerance(scenario, 2.0 * resolution.max(tau_step));
                let seed = ctx.seed(scenario);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let line = Arc::new(Polytope::unit_interval());
                let square = Arc::new(Polytope::unit_square());
                let grids = [Arc::new(Grid::new(&line, resolution)), Arc::new(Grid::new(&square, resolution))];
                let jobs: Vec<(usize, u64)> = (0..curves_1d + curves_2d).map(|i| (if i < curves_1d { 1 } else { 2 }, rng.gen())).collect();
                let rows: Vec<_> = jobs
                    .par_iter()
                    .map(|&(dim, s)| {
                        let mut rng = ChaCha8Rng::seed_from_u64(s);
                        let poly = if dim == 1 { &line } else { &square };
                        let curve = random_pl_curve(&mut rng, poly, &grids[dim - 1])?;
                        let errs = involution_errors(&curve, t_max, tau_step)?;
                        Ok::<_, RayError>((dim, curve.tau_minus(), curve.tau_plus(), errs))
                    })
                    .collect();
                let mut table = Table::new("curves", self.tables()[1].1);
                let (mut hc, mut ch) = (0.0f64, 0.0f64);
                for (i, r) in rows.into_iter().enumerate() {
                    match r {
                        Ok((dim, lo, hi, e)) => {
                            hc = fmax(hc, e.hat_check);
                            ch = fmax(ch, e.check_hat);
                            table.push(vec![i.into(), dim.into(), lo.into(), hi.into(), e.hat_check.into(), e.check_hat.into(), bound.into()]);
                        }
                        Err(e) => out.assertions.push(Assertion::error(format!("curve_{i}"), e)),
                    }
                }
                out.assertions.push(Assertion::at_most("hat_of_check", hc, bound, "sup error on relative interiors"));
                out.assertions.push(Assertion::at_most("check_of_hat", ch, bound, "sup error / max(1, t) on the interior of P"));
                out.tables.push(table);
            }
        }
        Ok(out)
    }
}
