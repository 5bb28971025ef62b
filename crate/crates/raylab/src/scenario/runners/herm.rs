use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;

use super::{fmax, Outcome};
use crate::herm::json::FamilyJson;
use crate::herm::{d1v_distance, det_slope, dualize, filtration_of, stieltjes_integral, FamilyOptions, MetricFamily};
use crate::scenario::random::{random_hilbert_family, random_metric, HilbertFamilySpec};
use crate::scenario::{Assertion, RunContext, Scenario, ScenarioError, ScenarioRunner, Table};

fn default_s_max() -> f64 {
    8.0
}

fn default_s_step() -> f64 {
    0.25
}

fn default_gap() -> f64 {
    3.0
}

#[derive(Debug, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
enum Inputs {
    /// Random positive families: determinant slope against the filtration.
    DeterminantSlope {
        families: usize,
        max_dim: usize,
        #[serde(default = "default_s_max")]
        s_max: f64,
        #[serde(default = "default_s_step")]
        s_step: f64,
        #[serde(default = "default_gap")]
        gap: f64,
    },
    /// Random pairs and triples: dual isometry, symmetry, triangle inequality.
    MetricAxioms { trials: usize, max_dim: usize },
    /// One family given explicitly.
    Family {
        family: FamilyJson,
        #[serde(default)]
        expected_det_slope: Option<f64>,
    },
}

pub struct HermSlope;

impl HermSlope {
    fn decode(scenario: &Scenario) -> Result<Inputs, ScenarioError> {
        let inputs: Inputs = scenario.decode_inputs()?;
        match &inputs {
            Inputs::DeterminantSlope { families, max_dim, s_max, s_step, gap } => {
                if *families == 0 || *max_dim == 0 || *max_dim > 64 {
                    return Err(ScenarioError::schema("inputs", "need families ≥ 1 and 1 ≤ max_dim ≤ 64"));
                }
                if !(*s_step > 0.0 && *s_max >= 4.0 * s_step && *gap > 0.0) {
                    return Err(ScenarioError::schema("inputs", "need s_step > 0, s_max ≥ 4 s_step and gap > 0"));
                }
            }
            Inputs::MetricAxioms { trials, max_dim } => {
                if *trials == 0 || *max_dim == 0 || *max_dim > 128 {
                    return Err(ScenarioError::schema("inputs", "need trials ≥ 1 and 1 ≤ max_dim ≤ 128"));
                }
            }
            Inputs::Family { family, .. } => {
                MetricFamily::try_from(family).map_err(|e| ScenarioError::schema("inputs.family", e))?;
            }
        }
        Ok(inputs)
    }
}

impl ScenarioRunner for HermSlope {
    fn kind(&self) -> &'static str {
        "herm_slope"
    }

    fn tables(&self) -> &'static [(&'static str, &'static [&'static str])] {
        &[
            ("families", &["family", "dim", "det_slope", "stieltjes", "exact", "slope_error", "exact_error", "warnings"]),
            ("trials", &["trial", "dim", "d_uv", "d_vu", "d_dual", "d_uw", "d_wv", "isometry_error", "symmetry_error", "triangle_excess"]),
            ("filtration", &["jump", "dim"]),
        ]
    }

    fn validate(&self, scenario: &Scenario) -> Result<(), ScenarioError> {
        Self::decode(scenario).map(|_| ())
    }

    fn run(&self, scenario: &Scenario, ctx: &RunContext) -> Result<Outcome, ScenarioError> {
        let seed = ctx.seed(scenario);
        let opts = FamilyOptions { seed, ..FamilyOptions::default() };
        let mut out = Outcome::default();
        match Self::decode(scenario)? {
            Inputs::DeterminantSlope { families, max_dim, s_max, s_step, gap } => {
                let tol = ctx.tolerance(scenario, 1e-3);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let jobs: Vec<(u64, usize)> = (0..families).map(|_| (rng.gen(), rng.gen_range(1..=max_dim))).collect();
                let rows: Vec<_> = jobs
                    .par_iter()
                    .map(|&(s, dim)| {
                        let mut rng = ChaCha8Rng::seed_from_u64(s);
                        let spec = HilbertFamilySpec { dim, s_max, s_step, gap };
                        let (fam, exact) = random_hilbert_family(&mut rng, &spec)?;
                        let est = det_slope(&fam, &opts)?;
                        let w = filtration_of(&fam, &opts)?;
                        Ok::<_, crate::herm::HermError>((dim, est, stieltjes_integral(&w), exact))
                    })
                    .collect();
                let mut table = Table::new("families", self.tables()[0].1);
                let (mut worst, mut worst_exact, mut warned) = (0.0f64, 0.0f64, 0usize);
                for (i, r) in rows.into_iter().enumerate() {
                    match r {
                        Ok((dim, est, st, exact)) => {
                            let e = (est.value - st).abs();
                            let ee = (est.value - exact).abs();
                            worst = fmax(worst, e);
                            worst_exact = fmax(worst_exact, ee);
                            warned += usize::from(!est.is_clean());
                            for w in &est.warnings {
                                out.warnings.push(format!("family {i}: {w}"));
                            }
                            table.push(vec![i.into(), dim.into(), est.value.into(), st.into(), exact.into(), e.into(), ee.into(), est.warnings.len().into()]);
                        }
                        Err(e) => out.assertions.push(Assertion::error(format!("family_{i}"), e)),
                    }
                }
                out.assertions.push(Assertion::at_most("det_slope_equals_stieltjes", worst, tol, format!("max over {families} families")));
                out.assertions.push(Assertion::at_most("det_slope_equals_exact", worst_exact, tol, "exact slope Σ_j min_i f_ji"));
                out.assertions.push(Assertion::at_most("families_positive", warned as f64, 0.0, "families with positivity warnings"));
                out.tables.push(table);
            }
            Inputs::MetricAxioms { trials, max_dim } => {
                let tol = ctx.tolerance(scenario, 1e-9);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let jobs: Vec<(u64, usize)> = (0..trials).map(|_| (rng.gen(), rng.gen_range(1..=max_dim))).collect();
                let rows: Vec<_> = jobs
                    .par_iter()
                    .map(|&(s, n)| {
                        let mut rng = ChaCha8Rng::seed_from_u64(s);
                        let (u, v, w) = (random_metric(&mut rng, n), random_metric(&mut rng, n), random_metric(&mut rng, n));
                        let d_uv = d1v_distance(&u, &v)?;
                        let d_vu = d1v_distance(&v, &u)?;
                        let d_dual = d1v_distance(&dualize(&u), &dualize(&v))?;
                        let d_uw = d1v_distance(&u, &w)?;
                        let d_wv = d1v_distance(&w, &v)?;
                        Ok::<_, crate::herm::HermError>((n, [d_uv, d_vu, d_dual, d_uw, d_wv]))
                    })
                    .collect();
                let mut table = Table::new("trials", self.tables()[1].1);
                let (mut iso, mut sym, mut tri) = (0.0f64, 0.0f64, 0.0f64);
                for (i, r) in rows.into_iter().enumerate() {
                    match r {
                        Ok((n, [d_uv, d_vu, d_dual, d_uw, d_wv])) => {
                            let e_iso = (d_uv - d_dual).abs();
                            let e_sym = (d_uv - d_vu).abs();
                            let e_tri = (d_uv - d_uw - d_wv).max(0.0);
                            iso = fmax(iso, e_iso);
                            sym = fmax(sym, e_sym);
                            tri = fmax(tri, e_tri);
                            table.push(vec![
                                i.into(), n.into(), d_uv.into(), d_vu.into(), d_dual.into(), d_uw.into(), d_wv.into(),
                                e_iso.into(), e_sym.into(), e_tri.into(),
                            ]);
                        }
                        Err(e) => out.assertions.push(Assertion::error(format!("trial_{i}"), e)),
                    }
                }
                out.assertions.push(Assertion::at_most("dual_isometry", iso, tol, "max |d(U,V) − d(U*,V*)|"));
                out.assertions.push(Assertion::at_most("symmetry", sym, tol, "max |d(U,V) − d(V,U)|"));
                out.assertions.push(Assertion::at_most("triangle_inequality", tri, tol, "max excess of d(U,V) over d(U,W) + d(W,V)"));
                out.tables.push(table);
            }
            Inputs::Family { family, expected_det_slope } => {
                let tol = ctx.tolerance(scenario, 1e-3);
                let fam = MetricFamily::try_from(&family).map_err(|e| ScenarioError::schema("inputs.family", e))?;
                match (det_slope(&fam, &opts), filtration_of(&fam, &opts)) {
                    (Ok(est), Ok(w)) => {
                        let st = stieltjes_integral(&w);
                        let mut table = Table::new("filtration", self.tables()[2].1);
                        for (j, d) in w.jumps().iter().zip(w.dims()) {
                            table.push(vec![(*j).into(), (*d).into()]);
                        }
                        out.tables.push(table);
                        out.warnings.extend(est.warnings.iter().map(|w| w.to_string()));
                        out.assertions.push(Assertion::at_most(
                            "det_slope_equals_stieltjes",
                            (est.value - st).abs(),
                            tol,
                            format!("det slope {:.6}, Stieltjes integral {st:.6}", est.value),
                        ));
                        if let Some(x) = expected_det_slope {
                            out.assertions.push(Assertion::at_most("det_slope_expected", (est.value - x).abs(), tol, format!("expected {x}")));
                        }
                    }
                    (Err(e), _) | (_, Err(e)) => out.assertions.push(Assertion::error("family", e)),
                }
            }
        }
        Ok(out)
    }
}
