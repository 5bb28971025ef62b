use serde::Deserialize;

use super::{fmax, Outcome};
use crate::quantize::{bonavero_table, h0_count};
use crate::scenario::{Assertion, RunContext, Scenario, ScenarioError, ScenarioRunner, Table, ToricCase};
use crate::toric::{factorial, mixed_mass_gap, DualPotential};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LimitCase {
    case: ToricCase,
    k_list: Vec<u32>,
    /// Limit of the normalized counts; the mass of `u` when absent.
    #[serde(default)]
    target: Option<f64>,
    tolerance: f64,
    /// Compare `|ratio − target| / |target|` instead of the absolute error.
    #[serde(default)]
    relative: bool,
}

fn default_constant() -> f64 {
    2.0
}

#[derive(Debug, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
enum Inputs {
    /// Final-row error of `n! h⁰(ku) / k^n` against the mass.
    Limit { cases: Vec<LimitCase> },
    /// `n! h⁰(ku) / k^n ≥ mass(u) − C/k` on every case and `k`.
    LowerBound {
        cases: Vec<ToricCase>,
        k_list: Vec<u32>,
        #[serde(default = "default_constant")]
        constant: f64,
    },
    /// Envelope identities and the mass gap to the envelope.
    Envelopes { cases: Vec<ToricCase> },
}

const MAX_K: [u32; 2] = [4096, 256];

fn check_k_list(k_list: &[u32], dim: usize, location: &str) -> Result<(), ScenarioError> {
    if k_list.is_empty() || k_list.iter().any(|k| *k == 0 || *k > MAX_K[dim - 1]) {
        return Err(ScenarioError::schema(location, format!("k_list must be nonempty with 1 ≤ k ≤ {}", MAX_K[dim - 1])));
    }
    Ok(())
}

/// Sup distance between two potentials, `∞` when the bodies differ.
fn potential_distance(a: &DualPotential, b: &DualPotential) -> f64 {
    if !a.body().approx_eq(b.body(), 1e-12) {
        return f64::INFINITY;
    }
    let nodes = a.values().iter().zip(b.values());
    let verts = a.vertex_values().iter().zip(b.vertex_values());
    nodes.chain(verts).fold(0.0f64, |m, (x, y)| if x.is_finite() || y.is_finite() { fmax(m, (x - y).abs()) } else { m })
}

pub struct Bonavero;

impl Bonavero {
    fn decode(scenario: &Scenario) -> Result<Inputs, ScenarioError> {
        let inputs: Inputs = scenario.decode_inputs()?;
        let res = Some(1.0);
        match &inputs {
            Inputs::Limit { cases } => {
                for (i, c) in cases.iter().enumerate() {
                    let loc = format!("inputs.cases[{i}]");
                    let (p, _, _) = c.case.build(res, &format!("{loc}.case"))?;
                    check_k_list(&c.k_list, p.dim(), &format!("{loc}.k_list"))?;
                    if !(c.tolerance > 0.0) {
                        return Err(ScenarioError::schema(format!("{loc}.tolerance"), "must be positive"));
                    }
                }
            }
            Inputs::LowerBound { cases, k_list, .. } => {
                for (i, c) in cases.iter().enumerate() {
                    let (p, _, _) = c.build(res, &format!("inputs.cases[{i}]"))?;
                    check_k_list(k_list, p.dim(), "inputs.k_list")?;
                }
            }
            Inputs::Envelopes { cases } => {
                for (i, c) in cases.iter().enumerate() {
                    c.build(res, &format!("inputs.cases[{i}]"))?;
                }
            }
        }
        Ok(inputs)
    }
}

impl ScenarioRunner for Bonavero {
    fn kind(&self) -> &'static str {
        "bonavero"
    }

    fn tables(&self) -> &'static [(&'static str, &'static [&'static str])] {
        &[
            ("bonavero", &["case", "k", "ratio", "target", "error"]),
            ("lower_bound", &["case", "k", "ratio", "mass", "slack"]),
            ("envelopes", &["case", "mass", "envelope_mass", "i_vs_model", "i_idempotent", "model_idempotent", "mass_gap"]),
        ]
    }

    fn validate(&self, scenario: &Scenario) -> Result<(), ScenarioError> {
        Self::decode(scenario).map(|_| ())
    }

    fn run(&self, scenario: &Scenario, ctx: &RunContext) -> Result<Outcome, ScenarioError> {
        let res = scenario.params.resolution;
        let twist = scenario.params.twist_margin.unwrap_or(0.0);
        let mut out = Outcome::default();
        match Self::decode(scenario)? {
            Inputs::Limit { cases } => {
                let mut table = Table::new("bonavero", self.tables()[0].1);
                for (i, c) in cases.iter().enumerate() {
                    let (_, _, u) = c.case.build(res, &format!("inputs.cases[{i}].case"))?;
                    let name = &c.case.name;
                    let t = match bonavero_table(&u, &c.k_list, twist) {
                        Ok(t) => t,
                        Err(e) => {
                            out.assertions.push(Assertion::error(format!("{name}_table"), e));
                            continue;
                        }
                    };
                    let target = c.target.unwrap_or(u.mass());
                    let err = |r: f64| if c.relative { (r - target).abs() / target.abs() } else { (r - target).abs() };
                    for row in &t.rows {
                        table.push(vec![name.as_str().into(), row.k.into(), row.ratio.into(), target.into(), err(row.ratio).into()]);
                    }
                    let last = t.rows.last().expect("nonempty k_list");
                    let tol = c.tolerance * ctx.tolerance_scale;
                    out.assertions.push(Assertion::at_most(
                        format!("{name}_final_row"),
                        err(last.ratio),
                        tol,
                        format!("k = {}, ratio {:.6}, target {target:.6}", last.k, last.ratio),
                    ));
                    out.assertions.push(Assertion::at_most(
                        format!("{name}_envelope_mass"),
                        err(last.envelope_mass),
                        tol,
                        "the limit is the mass of the envelope",
                    ));
                    out.warnings.push(format!("{name}: empirical constant max_k k|ratio − mass| = {:.4}", t.constant));
                }
                out.tables.push(table);
            }
            Inputs::LowerBound { cases, k_list, constant } => {
                let mut table = Table::new("lower_bound", self.tables()[1].1);
                let mut violations = 0usize;
                for (i, c) in cases.iter().enumerate() {
                    let (p, _, u) = c.build(res, &format!("inputs.cases[{i}]"))?;
                    let n = p.dim();
                    for &k in &k_list {
                        match h0_count(&u, k, twist) {
                            Ok(count) => {
                                let ratio = factorial(n) * count as f64 / (k as f64).powi(n as i32);
                                let slack = ratio - (u.mass() - constant / k as f64);
                                violations += usize::from(slack < 0.0);
                                table.push(vec![c.name.as_str().into(), k.into(), ratio.into(), u.mass().into(), slack.into()]);
                            }
                            Err(e) => out.assertions.push(Assertion::error(format!("{}_k{k}", c.name), e)),
                        }
                    }
                }
                out.assertions.push(Assertion::at_most(
                    "arithmetic_at_least_mass",
                    violations as f64,
                    0.0,
                    format!("rows with n! h⁰/k^n < mass − {constant}/k"),
                ));
                out.tables.push(table);
            }
            Inputs::Envelopes { cases } => {
                let tol = ctx.tolerance(scenario, 1e-9);
                let mut table = Table::new("envelopes", self.tables()[2].1);
                let mut worst = 0.0f64;
                for (i, c) in cases.iter().enumerate() {
                    let (_, _, u) = c.build(res, &format!("inputs.cases[{i}]"))?;
                    let ie = u.i_envelope();
                    let me = u.model_envelope();
                    let d_im = potential_distance(&ie, &me);
                    let d_ii = potential_distance(&ie.i_envelope(), &ie);
                    let d_mm = potential_distance(&me.model_envelope(), &me);
                    let gap = match mixed_mass_gap(&u, &ie) {
                        Ok(r) => r.gap.abs(),
                        Err(e) => {
                            out.assertions.push(Assertion::error(format!("{}_mass_gap", c.name), e));
                            f64::NAN
                        }
                    };
                    worst = [d_im, d_ii, d_mm, gap].into_iter().fold(worst, fmax);
                    table.push(vec![
                        c.name.as_str().into(), u.mass().into(), ie.mass().into(), d_im.into(), d_ii.into(), d_mm.into(), gap.into(),
                    ]);
                }
                out.assertions.push(Assertion::at_most("envelopes_coherent", worst, tol, "max over identities and mass gaps"));
                out.tables.push(table);
            }
        }
        Ok(out)
    }
}
