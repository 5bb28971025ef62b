use std::sync::Arc;

use proptest::prelude::*;
use raylab::raycurve::{
    check_ray, check_transform, default_t_grid, from_filtration, hat_curve, mass_curve, ray_energy_slope, Ray,
    TestCurve, ToricFiltration,
};
use raylab::toric::{DualPotential, Grid, MaxAffine, Polytope};

fn interval(h: f64) -> (Arc<Polytope>, Arc<Grid>) {
    let p = Arc::new(Polytope::unit_interval());
    let g = Arc::new(Grid::new(&p, h));
    (p, g)
}

fn pieces(n: usize) -> impl Strategy<Value = MaxAffine> {
    prop::collection::vec((prop::collection::vec(-1.0..1.0f64, n), -0.5..0.5f64), 1..4)
        .prop_map(move |p| MaxAffine::new(n, p).unwrap())
}

/// Midpoint rule for the mean of `f` over `[0, 1]^n`, `n ≤ 2`.
fn mean_oracle(f: &MaxAffine, n: usize) -> f64 {
    let m = if n == 1 { 20_000 } else { 400 };
    let mid = |i: usize| (i as f64 + 0.5) / m as f64;
    if n == 1 {
        (0..m).map(|i| f.eval(&[mid(i)])).sum::<f64>() / m as f64
    } else {
        (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).map(|(i, j)| f.eval(&[mid(i), mid(j)])).sum::<f64>()
            / (m * m) as f64
    }
}

/// Upper concave hull of the points `(x_i, y_i)` at `x`, by brute force over pairs.
fn concave_hull_at(pts: &[(f64, f64)], x: f64) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for a in pts {
        for b in pts {
            if a.0 <= x && x <= b.0 {
                let y = if b.0 - a.0 < 1e-15 { a.1.max(b.1) } else { a.1 + (b.1 - a.1) * (x - a.0) / (b.0 - a.0) };
                best = best.max(y);
            }
        }
    }
    best
}

fn pl_curve() -> impl Strategy<Value = TestCurve> {
    (pieces(1), prop::collection::vec((-1.0..1.0f64, -0.5..0.5f64, 0.5..2.0f64), 0..3)).prop_map(|(level, ps)| {
        let (p, g) = interval(1.0 / 64.0);
        TestCurve::pl(&p, &g, level, ps.into_iter().map(|(a, b, s)| (vec![a], b, s)).collect()).unwrap()
    })
}

fn filtration() -> impl Strategy<Value = (u32, Vec<f64>)> {
    (0u32..4).prop_flat_map(|e| {
        let k = 1 << e;
        (Just(k), prop::collection::vec(-2.0..2.0f64, k as usize + 1))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn energy_methods_match_the_mean(f in pieces(1), f2 in pieces(2)) {
        for (f, n) in [(f, 1), (f2, 2)] {
            let p = Arc::new(if n == 1 { Polytope::unit_interval() } else { Polytope::unit_square() });
            let g = Arc::new(Grid::default_for(&p));
            let ray = Ray::linear(&p, &g, f.clone(), default_t_grid(8.0)).unwrap();
            let exact = -mean_oracle(&f, n);
            let rep = ray_energy_slope(&ray).unwrap();
            for (name, v) in &rep.values {
                prop_assert!((v - exact).abs() < 5e-3, "{name}: {v} vs {exact} in dimension {n}");
            }
        }
    }

    #[test]
    fn check_of_hat_recovers_a_sampled_ray(f in pieces(1), t in 0.5..8.0f64) {
        let (p, g) = interval(1.0 / 64.0);
        let u = DualPotential::from_fn(&p, &g, p.body().clone(), |x| f.eval(x)).unwrap();
        let ray = Ray::linear_sampled(u.clone(), default_t_grid(8.0)).unwrap();
        let step = 1.0 / 64.0;
        let lo = (-u.max_value() / step).floor() - 2.0;
        let taus: Vec<f64> = (0..).map(|i| (lo + i as f64) * step).take_while(|&x| x <= -u.min_value() + 2.0 * step).collect();
        let curve = hat_curve(&ray, &taus).unwrap();
        let back = check_transform(&curve, t).unwrap();
        // Only τ on the grid are seen, which costs at most t · step.
        for i in 0..g.len() {
            let x = g.node(i);
            let exact = t * f.eval(&x);
            let got = back.eval(&x);
            prop_assert!(got >= exact - 1e-9 && got <= exact + t * step + 1e-9, "at {x:?}: {got} vs {exact}");
        }
    }

    #[test]
    fn check_ray_sup_slope_is_tau_plus(c in pl_curve()) {
        let ray = check_ray(&c, &default_t_grid(32.0)).unwrap();
        // The sup of the level over the grid misses an off-grid kink by at most h.
        prop_assert!((ray.sup_slope() - c.tau_plus()).abs() <= c.grid().resolution() + 1e-9,
            "{} vs {}", ray.sup_slope(), c.tau_plus());
    }

    #[test]
    fn masses_decrease_from_full_to_zero(c in pl_curve(), (k, w) in filtration()) {
        let (p, g) = interval(1.0 / 64.0);
        let wf = ToricFiltration::from_fn(&p, k, |a, _| w[a[0] as usize]);
        let fc = from_filtration(&p, &g, &wf).unwrap();
        for curve in [c, fc] {
            let taus = curve.taus(1.0 / 32.0);
            let m = mass_curve(&curve, &taus).unwrap();
            prop_assert!(m.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12));
            prop_assert!((m[0].1 - 1.0).abs() < 1e-12);
            prop_assert_eq!(curve.mass_at(curve.tau_plus() + 0.1).unwrap(), 0.0);
        }
    }

    #[test]
    fn filtration_check_is_the_concave_hull((k, w) in filtration(), t in 0.5..4.0f64) {
        let (p, g) = interval(1.0 / 128.0);
        let wf = ToricFiltration::from_fn(&p, k, |a, _| w[a[0] as usize]);
        let curve = from_filtration(&p, &g, &wf).unwrap();
        let kf = k as f64;
        let lo = w.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(curve.is_bounded());
        prop_assert!((curve.tau_minus() - lo / kf).abs() < 1e-12);
        prop_assert!((curve.tau_plus() - hi / kf).abs() < 1e-12);
        let pts: Vec<(f64, f64)> = w.iter().enumerate().map(|(j, v)| (j as f64 / kf, v / kf)).collect();
        let psi = check_transform(&curve, t).unwrap();
        let ray = check_ray(&curve, &default_t_grid(8.0)).unwrap();
        let at_one = ray.at(1.0).unwrap();
        for i in 0..g.len() {
            let x = g.node(i);
            let hull = concave_hull_at(&pts, x[0]);
            prop_assert!((psi.eval(&x) + t * hull).abs() < 1e-9, "at {x:?}: {} vs {}", psi.eval(&x), -t * hull);
            prop_assert!((at_one.eval(&x) + hull).abs() < 1e-9);
        }
    }
}
