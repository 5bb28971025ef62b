//! Acceptance run: one line per criterion, with the measured quantity, the
//! pinned tolerance and the runtime against its limit.
//!
//! Each criterion runs its bundled scenario through the registry and then
//! rechecks the tables against closed forms or direct counts computed here.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use raylab::quantize::ina;
use raylab::raycurve::{default_t_grid, Ray};
use raylab::scenario::{bundled, Outcome, Registry, RunContext, Table};
use raylab::toric::{Grid, MaxAffine, Polytope};

/// Criteria that fail for reasons recorded outside the code; they are
/// reported but do not fail the run.
const KNOWN_OPEN: &[u8] = &[9];

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn run(name: &str) -> Outcome {
    let s = bundled(name).unwrap_or_else(|| panic!("{name} is bundled")).scenario().expect("bundled scenarios parse");
    Registry::default().run(&s, &RunContext::default()).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn table<'a>(o: &'a Outcome, name: &str) -> &'a Table {
    o.tables.iter().find(|t| t.name == name).unwrap_or_else(|| panic!("table {name}"))
}

fn index(t: &Table, column: &str) -> usize {
    t.columns.iter().position(|c| c == column).unwrap_or_else(|| panic!("column {column} of {}", t.name))
}

fn floats(t: &Table, column: &str) -> Vec<f64> {
    let i = index(t, column);
    t.rows.iter().map(|r| r[i].as_f64().expect("numeric cell")).collect()
}

fn texts(t: &Table, column: &str) -> Vec<String> {
    let i = index(t, column);
    t.rows
        .iter()
        .map(|r| match &r[i] {
            raylab::scenario::Cell::Text(s) => s.clone(),
            raylab::scenario::Cell::Int(i) => i.to_string(),
            raylab::scenario::Cell::Float(x) => x.to_string(),
        })
        .collect()
}

fn max(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}

fn c1() -> Verdict {
    let o = run("det_slope_random");
    let t = table(&o, "families");
    let dims = floats(t, "dim");
    let gap = max(floats(t, "slope_error"));
    // The generator's exponent sum is the slope in closed form.
    let exact = max(floats(t, "det_slope").iter().zip(floats(t, "exact")).map(|(a, b)| (a - b).abs()));
    let ok = t.rows.len() == 50 && dims.iter().all(|d| *d <= 8.0) && gap <= 1e-3 && exact <= 1e-3;
    verdict(ok, format!("{} families, max |slope - stieltjes| = {gap:.2e}, max |slope - exact| = {exact:.2e} (tol 1e-3)", t.rows.len()))
}

fn c2() -> Verdict {
    let o = run("dual_isometry_random");
    let t = table(&o, "trials");
    let worst = max(["isometry_error", "symmetry_error", "triangle_excess"].iter().flat_map(|c| floats(t, c)));
    let dims = max(floats(t, "dim"));
    let nonneg = floats(t, "d_uv").iter().all(|d| *d >= 0.0);
    let ok = t.rows.len() == 200 && dims <= 32.0 && nonneg && worst <= 1e-9;
    verdict(ok, format!("{} trials up to N = {dims}, worst axiom defect {worst:.2e} (tol 1e-9)", t.rows.len()))
}

fn c3() -> Verdict {
    let o = run("legendre_involution");
    let t = table(&o, "curves");
    let dims = floats(t, "dim");
    let (n1, n2) = (dims.iter().filter(|d| **d == 1.0).count(), dims.iter().filter(|d| **d == 2.0).count());
    let bound = 2.0 / 64.0;
    let worst = max(floats(t, "hat_check_error").into_iter().chain(floats(t, "check_hat_error")));
    let ok = n1 == 20 && n2 == 5 && worst <= bound;
    verdict(ok, format!("{n1} curves at n=1, {n2} at n=2, worst sup error {worst:.2e} (tol {bound:.3e})"))
}

fn c4() -> Verdict {
    // −mean of the slope over P, by hand.
    let oracle = |ray: &str| match ray {
        "tp" => -0.5,
        "hinge" => -1.0 / 16.0,
        "square_max" => -2.0 / 3.0,
        "triangle_tilt" => -5.0 / 12.0,
        other => panic!("no closed form for {other}"),
    };
    let mut spread = 0.0f64;
    let mut error = 0.0f64;
    for name in ["energy_ray_family", "toric_ray_halfslope"] {
        let o = run(name);
        let t = table(&o, "energy");
        let rays = texts(t, "ray");
        let values = floats(t, "value");
        for (i, (r, v)) in rays.iter().zip(&values).enumerate() {
            error = error.max((v - oracle(r)).abs());
            for (r2, v2) in rays.iter().zip(&values).skip(i + 1) {
                if r == r2 {
                    spread = spread.max((v - v2).abs());
                }
            }
        }
    }
    verdict(spread <= 5e-3 && error <= 5e-3, format!("method spread {spread:.2e}, error against closed forms {error:.2e} (tol 5e-3)"))
}

fn c5() -> Verdict {
    let o = run("bonavero_limit");
    let t = table(&o, "bonavero");
    let cases = texts(t, "case");
    let ks = floats(t, "k");
    let ratios = floats(t, "ratio");
    let row = |case: &str, k: f64| {
        cases.iter().zip(&ks).zip(&ratios).find(|((c, kk), _)| *c == case && **kk == k).map(|(_, r)| *r)
    };
    // Direct counts: the facet x = 1/2 and the hypotenuse x + y = 1 are interior, hence open.
    let half = (0..=200).filter(|j| 2 * j < 200).count() as f64 / 200.0;
    let tri = 2.0 * (0..=64).flat_map(|i| (0..=64).map(move |j| (i, j))).filter(|(i, j)| i + j < 64).count() as f64 / 4096.0;
    let (Some(h), Some(tr)) = (row("half_interval", 200.0), row("triangle", 64.0)) else {
        return verdict(false, "missing k = 200 or k = 64 row".into());
    };
    let ok = (h - 0.5).abs() <= 0.01 && (tr - 1.0).abs() <= 0.02 && h == half && tr == tri;
    verdict(ok, format!("k=200: |ratio - 1/2| = {:.2e} (tol 1e-2); triangle k=64: rel error {:.2e} (tol 2e-2)", (h - 0.5).abs(), (tr - 1.0).abs()))
}

fn c6() -> Verdict {
    let o = run("arithmetic_lower_bound");
    let t = table(&o, "lower_bound");
    let slack = floats(t, "slack");
    let violations = slack.iter().filter(|s| **s < 0.0).count();
    // The full interval counts k + 1 points.
    let cases = texts(t, "case");
    let ks = floats(t, "k");
    let ratios = floats(t, "ratio");
    let ref_ok = cases
        .iter()
        .zip(ks.iter().zip(&ratios))
        .filter(|(c, _)| *c == "reference_interval")
        .all(|(_, (k, r))| (r - (k + 1.0) / k).abs() < 1e-12);
    let ok = violations == 0 && ref_ok && !slack.is_empty();
    verdict(ok, format!("{violations} violations over {} (case, k) pairs; min slack {:.3e}", slack.len(), slack.iter().copied().fold(f64::INFINITY, f64::min)))
}

fn c7() -> Verdict {
    let o = run("lkna_expansion");
    let t = table(&o, "lkna");
    let ks = texts(t, "k");
    let values = floats(t, "value");
    let rows = ks.iter().zip(&values).filter_map(|(k, v)| k.parse::<f64>().ok().map(|k| (k, *v)));
    let exact = max(rows.map(|(k, v)| (v + (k + 1.0) / (2.0 * k)).abs()));
    let table_limit = ks.iter().position(|k| k == "limit").map(|i| values[i]);
    let p = Arc::new(Polytope::unit_interval());
    let g = Arc::new(Grid::default_for(&p));
    let ray = Ray::linear(&p, &g, MaxAffine::affine(vec![1.0], 0.0), default_t_grid(16.0)).expect("tp ray");
    let limit = ina(&ray, &[8, 16, 32, 64, 128], 0.0).expect("ina").limit;
    let ok = exact <= 1e-12 && (limit + 0.5).abs() <= 5e-3 && table_limit.is_some_and(|l| (l - limit).abs() < 1e-12);
    verdict(ok, format!("max |(1/k) lkna + (k+1)/(2k)| = {exact:.2e}; ina = {limit:.6} (tol 5e-3 about -1/2)"))
}

fn c8() -> Verdict {
    let o = run("slope_bridge");
    let t = table(&o, "slopes");
    let errors = floats(t, "error");
    // lkna of a sublevel curve sums −f(j/k) over sections.
    let tp = |p: f64| p;
    let hinge = |p: f64| (-0.5 * p).max(2.0 * p - 1.25);
    let sum = |f: &dyn Fn(f64) -> f64| -(0..=16).map(|j| f(j as f64 / 16.0)).sum::<f64>();
    let oracle = [sum(&tp), sum(&hinge)];
    let na_ok = floats(t, "lkna").iter().zip(oracle).all(|(a, b)| (a - b).abs() < 1e-12);
    let worst = max(errors.iter().copied());
    verdict(errors.len() == 2 && na_ok && worst <= 1e-2, format!("2 rays at k=16, max |slope - lkna| = {worst:.2e} (tol 1e-2)"))
}

fn c9() -> Verdict {
    let o = run("quantization_smooth");
    let t = table(&o, "quantization");
    let rel = floats(t, "relative_error");
    let gaps = floats(t, "d1_gap");
    let energy = floats(t, "energy");
    // I(u) = −∫ (9/4 − p + p²) dp.
    let e_ok = energy.iter().all(|e| (e + 25.0 / 12.0).abs() < 1e-6);
    let monotone = gaps.windows(2).all(|w| w[1] <= w[0]);
    let worst = max(rel.iter().copied());
    let ks = floats(t, "k");
    let per_k: Vec<String> = ks.iter().zip(&rel).map(|(k, r)| format!("{k}: {r:.3}")).collect();
    verdict(
        e_ok && monotone && worst <= 0.05,
        format!("relative error by k [{}] (tol 5e-2); d1 gap nonincreasing: {monotone}", per_k.join(", ")),
    )
}

fn c10() -> Verdict {
    let o = run("exponent_bridge");
    let t = table(&o, "sections");
    let alphas = floats(t, "alpha");
    let thresholds = floats(t, "threshold");
    // k · max(f(α/k), 0) for the normalized hinge f = max(1/4 − p/2, 2p − 1).
    let f = |p: f64| (0.25 - 0.5 * p).max(2.0 * p - 1.0);
    let th_ok = alphas.iter().zip(&thresholds).all(|(a, th)| (8.0 * f(a / 8.0).max(0.0) - th).abs() < 1e-9);
    let worst = max(floats(t, "error"));
    verdict(t.rows.len() == 9 && th_ok && worst <= 1e-2, format!("{} sections at k=8, max error {worst:.2e} (tol 1e-2)", t.rows.len()))
}

fn c11() -> Verdict {
    let o = run("envelope_coherence");
    let t = table(&o, "envelopes");
    let worst = max(["i_vs_model", "i_idempotent", "model_idempotent", "mass_gap"].iter().flat_map(|c| floats(t, c)));
    let masses = max(floats(t, "mass").iter().zip(floats(t, "envelope_mass")).map(|(a, b)| (a - b).abs()));
    verdict(t.rows.len() == 8 && worst <= 1e-9 && masses <= 1e-9, format!("{} potentials, worst defect {worst:.2e} (tol 1e-9)", t.rows.len()))
}

fn main() -> ExitCode {
    let criteria: [(u8, &str, Option<f64>, fn() -> Verdict); 11] = [
        (1, "determinant slope", Some(10.0), c1),
        (2, "dual isometry and d1 axioms", Some(5.0), c2),
        (3, "Legendre involution", Some(30.0), c3),
        (4, "energy formula", Some(10.0), c4),
        (5, "Bonavero limit", Some(60.0), c5),
        (6, "arithmetic lower bound", None, c6),
        (7, "L_k^NA expansion", Some(120.0), c7),
        (8, "slope bridge", Some(120.0), c8),
        (9, "quantization", Some(120.0), c9),
        (10, "exponent bridge", Some(60.0), c10),
        (11, "envelope coherence", None, c11),
    ];
    let mut unexpected = 0;
    for (id, title, limit, check) in criteria {
        let start = Instant::now();
        let v = check();
        let secs = start.elapsed().as_secs_f64();
        let in_time = limit.map_or(true, |l| secs < l);
        let passed = v.passed && in_time;
        let time = match limit {
            Some(l) => format!("{secs:.2} s of {l:.0} s"),
            None => format!("{secs:.2} s"),
        };
        let status = match (passed, KNOWN_OPEN.contains(&id)) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known open)",
            (false, false) => {
                unexpected += 1;
                "FAIL"
            }
        };
        println!("criterion {id:>2} {status}: {title}: {}; {time}", v.detail);
    }
    if unexpected > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
