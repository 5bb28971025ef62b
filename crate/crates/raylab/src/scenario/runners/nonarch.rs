use serde::Deserialize;

use super::{fmax, Outcome};
use crate::quantize::{count_step, exponent_bridge, ina, lk_ray_slope, lkna, lkna_integral_form, HilbertOptions};
use crate::raycurve::{hat_curve, Ray};
use crate::scenario::{Assertion, RaySpec, RunContext, Scenario, ScenarioError, ScenarioRunner, Table};
use crate::toric::factorial;

fn default_horizon() -> f64 {
    16.0
}

#[derive(Debug, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
enum Inputs {
    /// `(n!/k^n) L_k^NA` over `k_list` and its extrapolated limit.
    Expansion {
        ray: RaySpec,
        k_list: Vec<u32>,
        #[serde(default)]
        expected_limit: Option<f64>,
    },
    /// Slope of `L_k` along the ray against `L_k^NA` of its Legendre transform.
    SlopeBridge {
        rays: Vec<RaySpec>,
        k: u32,
        #[serde(default = "default_horizon")]
        horizon: f64,
    },
    /// Exponents of the Hilbert norms against integrability thresholds.
    ExponentBridge {
        ray: RaySpec,
        k: u32,
        #[serde(default = "default_horizon")]
        horizon: f64,
    },
}

fn build(spec: &RaySpec, scenario: &Scenario, horizon: f64, location: &str) -> Result<Ray, ScenarioError> {
    spec.build(scenario.params.resolution, scenario.params.horizon.unwrap_or(horizon), location)
}

fn need_dim_one(ray: &Ray, location: &str) -> Result<(), ScenarioError> {
    if ray.polytope().dim() != 1 {
        return Err(ScenarioError::schema(location, "Hilbert maps are available in dimension one only"));
    }
    Ok(())
}

fn check_k(k: u32, location: &str) -> Result<(), ScenarioError> {
    if k == 0 || k > 4096 {
        return Err(ScenarioError::schema(location, "k must lie in [1, 4096]"));
    }
    Ok(())
}

pub struct LknaConvergence;

impl LknaConvergence {
    fn decode(scenario: &Scenario) -> Result<Inputs, ScenarioError> {
        let inputs: Inputs = scenario.decode_inputs()?;
        match &inputs {
            Inputs::Expansion { ray, k_list, .. } => {
                build(ray, scenario, 16.0, "inputs.ray")?;
                if k_list.is_empty() {
                    return Err(ScenarioError::schema("inputs.k_list", "k_list must be nonempty"));
                }
                for k in k_list {
                    check_k(*k, "inputs.k_list")?;
                }
            }
            Inputs::SlopeBridge { rays, k, horizon } => {
                check_k(*k, "inputs.k")?;
                for (i, r) in rays.iter().enumerate() {
                    let loc = format!("inputs.rays[{i}]");
                    need_dim_one(&build(r, scenario, *horizon, &loc)?, &loc)?;
                }
            }
            Inputs::ExponentBridge { ray, k, horizon } => {
                check_k(*k, "inputs.k")?;
                need_dim_one(&build(ray, scenario, *horizon, "inputs.ray")?, "inputs.ray")?;
            }
        }
        Ok(inputs)
    }
}

impl ScenarioRunner for LknaConvergence {
    fn kind(&self) -> &'static str {
        "lkna_convergence"
    }

    fn tables(&self) -> &'static [(&'static str, &'static [&'static str])] {
        &[
            ("lkna", &["k", "value", "integral_form", "target", "error"]),
            ("slopes", &["ray", "k", "lk_slope", "lkna", "error"]),
            ("sections", &["alpha", "exponent", "threshold", "error"]),
        ]
    }

    fn validate(&self, scenario: &Scenario) -> Result<(), ScenarioError> {
        Self::decode(scenario).map(|_| ())
    }

    fn run(&self, scenario: &Scenario, ctx: &RunContext) -> Result<Outcome, ScenarioError> {
        let twist = scenario.params.twist_margin.unwrap_or(0.0);
        let opts = HilbertOptions::default();
        let mut out = Outcome::default();
        match Self::decode(scenario)? {
            Inputs::Expansion { ray: spec, k_list, expected_limit } => {
                let tol = ctx.tolerance(scenario, 5e-3);
                let ray = build(&spec, scenario, 16.0, "inputs.ray")?;
                let n = ray.polytope().dim();
                let v = ray.polytope().total_mass();
                let curve = hat_curve(&ray, &[]).expect("linear rays have exact transforms");
                let mut table = Table::new("lkna", self.tables()[0].1);
                let mut form_gap = 0.0f64;
                let report = match ina(&ray, &k_list, twist) {
                    Ok(r) => r,
                    Err(e) => {
                        out.assertions.push(Assertion::error("ina", e));
                        return Ok(out);
                    }
                };
                for &(k, value) in &report.rows {
                    let norm = factorial(n) / (k as f64).powi(n as i32);
                    let integral = match count_step(&curve, k, twist) {
                        Ok(step) => norm * lkna_integral_form(&step, curve.tau_plus(), v),
                        Err(e) => {
                            out.assertions.push(Assertion::error(format!("count_step_k{k}"), e));
                            f64::NAN
                        }
                    };
                    form_gap = fmax(form_gap, (integral - value).abs());
                    let target = expected_limit.unwrap_or(f64::NAN);
                    table.push(vec![k.into(), value.into(), integral.into(), target.into(), (value - target).abs().into()]);
                }
                table.push(vec!["limit".into(), report.limit.into(), f64::NAN.into(), expected_limit.unwrap_or(f64::NAN).into(),
                    (report.limit - expected_limit.unwrap_or(f64::NAN)).abs().into()]);
                out.assertions.push(Assertion::at_most("integral_form_agrees", form_gap, 1e-9, "Stieltjes sum against the integral form"));
                if let Some(x) = expected_limit {
                    out.assertions.push(Assertion::at_most("extrapolated_limit", (report.limit - x).abs(), tol, format!("fit a + b/k, expected {x}")));
                }
                out.warnings.extend(report.warnings.iter().map(|w| w.to_string()));
                out.tables.push(table);
            }
            Inputs::SlopeBridge { rays, k, horizon } => {
                let tol = ctx.tolerance(scenario, 1e-2);
                let mut table = Table::new("slopes", self.tables()[1].1);
                for (i, spec) in rays.iter().enumerate() {
                    let ray = build(spec, scenario, horizon, &format!("inputs.rays[{i}]"))?;
                    let curve = hat_curve(&ray, &[]).expect("linear rays have exact transforms");
                    match (lk_ray_slope(&ray, k, &opts), lkna(&curve, k, twist)) {
                        (Ok(s), Ok(l)) => {
                            let err = (s.slope - l).abs();
                            out.warnings.extend(s.warnings.iter().map(|w| format!("{}: {w}", spec.name)));
                            table.push(vec![spec.name.as_str().into(), k.into(), s.slope.into(), l.into(), err.into()]);
                            out.assertions.push(Assertion::at_most(
                                format!("{}_slope_bridge", spec.name),
                                err,
                                tol,
                                format!("L_k slope {:.6}, L_k^NA {l:.6}", s.slope),
                            ));
                        }
                        (Err(e), _) | (_, Err(e)) => out.assertions.push(Assertion::error(format!("{}_slope_bridge", spec.name), e)),
                    }
                }
                out.tables.push(table);
            }
            Inputs::ExponentBridge { ray: spec, k, horizon } => {
                let tol = ctx.tolerance(scenario, 1e-2);
                let ray = build(&spec, scenario, horizon, "inputs.ray")?;
                let mut table = Table::new("sections", self.tables()[2].1);
                let mut worst = 0.0f64;
                let points = ray.polytope().lattice_points(k);
                for alpha in &points {
                    let a = alpha[0];
                    match exponent_bridge(&ray, k, alpha, twist, &opts) {
                        Ok((lhs, rhs)) => {
                            worst = fmax(worst, (lhs - rhs).abs());
                            table.push(vec![a.into(), lhs.into(), rhs.into(), (lhs - rhs).abs().into()]);
                        }
                        Err(e) => out.assertions.push(Assertion::error(format!("section_{a}"), e)),
                    }
                }
                out.assertions.push(Assertion::at_most("exponent_bridge", worst, tol, format!("max over the {} sections at k = {k}", points.len())));
                out.tables.push(table);
            }
        }
        Ok(out)
    }
}
