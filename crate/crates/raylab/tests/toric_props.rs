use std::sync::Arc;

use proptest::prelude::*;
use raylab::toric::{legendre_dual_1d, mixed_mass_gap, ConvexBody, DualPotential, Grid, MaxAffine, Polytope};

fn interval() -> (Arc<Polytope>, Arc<Grid>) {
    let p = Arc::new(Polytope::unit_interval());
    let g = Arc::new(Grid::new(&p, 1.0 / 128.0));
    (p, g)
}

fn square() -> (Arc<Polytope>, Arc<Grid>) {
    let p = Arc::new(Polytope::unit_square());
    let g = Arc::new(Grid::new(&p, 1.0 / 16.0));
    (p, g)
}

/// Max-affine duals with slopes in `[-1, 1]^n`.
fn pieces(n: usize) -> impl Strategy<Value = MaxAffine> {
    prop::collection::vec((prop::collection::vec(-1.0..1.0f64, n), -0.5..0.5f64), 1..4)
        .prop_map(move |p| MaxAffine::new(n, p).unwrap())
}

fn full_1d() -> impl Strategy<Value = DualPotential> {
    pieces(1).prop_map(|f| {
        let (p, g) = interval();
        DualPotential::from_fn(&p, &g, p.body().clone(), |x| f.eval(x)).unwrap()
    })
}

fn sub_interval() -> impl Strategy<Value = ConvexBody> {
    (0u32..=64, 0u32..=64).prop_map(|(a, b)| {
        let (lo, hi) = (a.min(b) as f64 / 64.0, a.max(b) as f64 / 64.0);
        ConvexBody::interval(lo, hi)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn energy_shifts_exactly(u in full_1d(), c in -3.0..3.0f64) {
        prop_assert!((u.shifted(c).energy_i() - (u.energy_i() + c)).abs() < 1e-12);
    }

    #[test]
    fn energy_of_affine_dual(a in -2.0..2.0f64, b in -2.0..2.0f64, a2 in -2.0..2.0f64) {
        // I = −∫ g over the unit interval and square, by hand.
        let (p, g) = interval();
        let u = DualPotential::from_fn(&p, &g, p.body().clone(), |x| a * x[0] + b).unwrap();
        prop_assert!((u.energy_i() + a / 2.0 + b).abs() < 1e-12);
        let (p, g) = square();
        let u = DualPotential::from_fn(&p, &g, p.body().clone(), |x| a * x[0] + a2 * x[1] + b).unwrap();
        prop_assert!((u.energy_i() + (a + a2) / 2.0 + b).abs() < 1e-12);
    }

    #[test]
    fn rooftop_laws(u in full_1d(), v in full_1d(), bump in 0.0..1.0f64) {
        let uu = u.rooftop(&u).unwrap();
        prop_assert_eq!(uu.values(), u.values());
        let uv = u.rooftop(&v).unwrap();
        let vu = v.rooftop(&u).unwrap();
        prop_assert_eq!(uv.values(), vu.values());
        // Raising one dual raises the rooftop dual.
        let higher = u.shifted(-bump).rooftop(&v).unwrap();
        prop_assert!(higher.values().iter().zip(uv.values()).all(|(h, r)| *h >= *r - 1e-15));
        // P(u, v) lies below both.
        prop_assert!(uv.dominates(&u, 0.0) || uv.values().iter().zip(u.values()).all(|(r, a)| r >= a));
    }

    #[test]
    fn d1_axioms(u in full_1d(), v in full_1d(), w in full_1d()) {
        let uv = u.d1_distance(&v).unwrap();
        let vu = v.d1_distance(&u).unwrap();
        let uw = u.d1_distance(&w).unwrap();
        let vw = v.d1_distance(&w).unwrap();
        prop_assert!(u.d1_distance(&u).unwrap() < 1e-9);
        prop_assert!((uv - vu).abs() < 1e-9);
        prop_assert!(uw <= uv + vw + 1e-9);
    }

    #[test]
    fn mass_is_monotone(a in sub_interval(), b in sub_interval()) {
        let (p, g) = interval();
        let ua = DualPotential::model(&p, &g, a.clone()).unwrap();
        let hull = DualPotential::model(&p, &g, a.hull_union(&b)).unwrap();
        prop_assert!(ua.mass() <= hull.mass() + 1e-15);
        prop_assert_eq!(ua.model_envelope().mass(), ua.mass());
        prop_assert!((ua.mass() - a.volume()).abs() < 1e-15);
    }

    #[test]
    fn mass_gap_detects_bodies(a in sub_interval(), b in sub_interval(), f in pieces(1)) {
        let (p, g) = interval();
        let u = DualPotential::from_fn(&p, &g, a.clone(), |x| f.eval(x)).unwrap();
        let v = DualPotential::model(&p, &g, b.clone()).unwrap();
        let gap = mixed_mass_gap(&u, &v).unwrap().gap;
        prop_assert!(gap >= -1e-12);
        if gap.abs() < 1e-12 {
            prop_assert!(a.approx_eq(&b, 1e-12));
        }
        prop_assert!(mixed_mass_gap(&u, &u.i_envelope()).unwrap().gap.abs() < 1e-12);
        let env = u.i_envelope();
        prop_assert_eq!(env.model_envelope(), env.clone());
        prop_assert_eq!(u.i_envelope(), u.model_envelope());
    }

    #[test]
    fn planar_mass_gap(xs in prop::collection::vec((0u32..=8, 0u32..=8), 3..6)) {
        let (p, g) = square();
        let pts: Vec<Vec<f64>> = xs.iter().map(|(a, b)| vec![*a as f64 / 8.0, *b as f64 / 8.0]).collect();
        let body = ConvexBody::hull(2, &pts).unwrap();
        let u = DualPotential::model(&p, &g, body.clone()).unwrap();
        prop_assert!((u.mass() - 2.0 * body.volume()).abs() < 1e-12);
        let r = DualPotential::reference(&p, &g);
        let gap = mixed_mass_gap(&u, &r).unwrap().gap;
        prop_assert!(gap >= -1e-12);
        prop_assert_eq!(gap.abs() < 1e-12, body.approx_eq(p.body(), 1e-12));
    }

    #[test]
    fn conjugacy_involution(f in pieces(1)) {
        let (p, g) = interval();
        let u = DualPotential::from_fn(&p, &g, p.body().clone(), |x| f.eval(x)).unwrap();
        let xs: Vec<f64> = (0..=1024).map(|i| -2.0 + i as f64 / 256.0).collect();
        let fs: Vec<f64> = xs.iter().map(|x| u.primal_eval(&[*x])).collect();
        let back = legendre_dual_1d(&p, &g, &xs, &fs).unwrap();
        // A kink of the primal between x-nodes costs at most Δx times the
        // jump in slope there, which is bounded by diam P = 1.
        let tol = (1.0 / 256.0) * 1.01;
        for i in 1..g.len() - 1 {
            let x = g.node(i);
            prop_assert!((back.eval(&x) - u.eval(&x)).abs() <= tol, "at {x:?}");
        }
    }
}
