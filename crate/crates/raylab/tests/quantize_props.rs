use std::sync::Arc;

use proptest::prelude::*;
use raylab::quantize::{count_step, d1k, h0_count, lk, lkna, lkna_integral_form, HilbertOptions};
use raylab::raycurve::{from_filtration, TestCurve, ToricFiltration};
use raylab::toric::{ConvexBody, DualPotential, Grid, MaxAffine, Polytope};

fn interval() -> (Arc<Polytope>, Arc<Grid>) {
    let p = Arc::new(Polytope::unit_interval());
    let g = Arc::new(Grid::new(&p, 1.0 / 64.0));
    (p, g)
}

fn pieces() -> impl Strategy<Value = MaxAffine> {
    prop::collection::vec((-1.0..1.0f64, -0.5..0.5f64), 1..4)
        .prop_map(|p| MaxAffine::new(1, p.into_iter().map(|(a, b)| (vec![a], b)).collect()).unwrap())
}

fn curve() -> impl Strategy<Value = TestCurve> {
    prop_oneof![
        (pieces(), prop::collection::vec((-1.0..1.0f64, -0.5..0.5f64, 0.5..2.0f64), 0..3)).prop_map(|(level, ps)| {
            let (p, g) = interval();
            TestCurve::pl(&p, &g, level, ps.into_iter().map(|(a, b, s)| (vec![a], b, s)).collect()).unwrap()
        }),
        (1u32..=6).prop_flat_map(|k| prop::collection::vec(-2.0..2.0f64, k as usize + 1).prop_map(move |w| {
            let (p, g) = interval();
            from_filtration(&p, &g, &ToricFiltration::from_fn(&p, k, |a, _| w[a[0] as usize])).unwrap()
        })),
    ]
}

/// `j/k` admitted by `[a, b] ⊂ [0, 1]`: ends on `∂P` are closed, interior ends open.
fn count_oracle(a: f64, b: f64, k: u32) -> usize {
    (0..=k)
        .map(|j| j as f64 / k as f64)
        .filter(|x| if a == 0.0 { *x >= a } else { *x > a })
        .filter(|x| if b == 1.0 { *x <= b } else { *x < b })
        .count()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lkna_matches_its_integral_form(c in curve(), k in 1u32..24) {
        let step = count_step(&c, k, 0.0).unwrap();
        let v = c.polytope().total_mass();
        let direct = lkna(&c, k, 0.0).unwrap();
        prop_assert!((lkna_integral_form(&step, c.tau_plus(), v) - direct).abs() < 1e-12 * (1.0 + direct.abs()));
        prop_assert_eq!(step.counts[0], step.total);
        prop_assert_eq!(step.eval(c.tau_plus() + 1e-6), 0);
    }

    #[test]
    fn lkna_is_monotone_and_shifts(level in pieces(), lift in 0.0..1.0f64, c in -2.0..2.0f64, k in 1u32..24) {
        let (p, g) = interval();
        let low = TestCurve::sublevel(&p, &g, level.clone()).unwrap();
        let high = TestCurve::sublevel(&p, &g, level.shifted(lift)).unwrap();
        let a = lkna(&low, k, 0.0).unwrap();
        prop_assert!(lkna(&high, k, 0.0).unwrap() <= a + 1e-12);
        let n = (k + 1) as f64;
        prop_assert!((lkna(&low.shifted(c), k, 0.0).unwrap() - (a + c * n)).abs() < 1e-9);
    }

    #[test]
    fn sections_follow_the_facet_rule(a in 0u32..=64, b in 0u32..=64, k in 1u32..60) {
        let (p, g) = interval();
        let (lo, hi) = (a.min(b) as f64 / 64.0, a.max(b) as f64 / 64.0);
        let u = DualPotential::model(&p, &g, ConvexBody::interval(lo, hi)).unwrap();
        let count = h0_count(&u, k, 0.0).unwrap();
        prop_assert_eq!(count, count_oracle(lo, hi, k));
        prop_assert!(count as f64 / k as f64 >= u.mass() - 2.0 / k as f64);
    }

    #[test]
    fn full_bodies_count_every_lattice_point(k in 1u32..30) {
        let (p, g) = interval();
        prop_assert_eq!(h0_count(&DualPotential::reference(&p, &g), k, 0.0).unwrap(), k as usize + 1);
        let sq = Arc::new(Polytope::unit_square());
        let gs = Arc::new(Grid::new(&sq, 1.0 / 8.0));
        prop_assert_eq!(h0_count(&DualPotential::reference(&sq, &gs), k, 0.0).unwrap(), ((k + 1) * (k + 1)) as usize);
        let tri = Arc::new(Polytope::new(2, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap());
        let gt = Arc::new(Grid::new(&tri, 1.0 / 8.0));
        prop_assert_eq!(h0_count(&DualPotential::reference(&tri, &gt), k, 0.0).unwrap(), ((k + 1) * (k + 2) / 2) as usize);
    }

    #[test]
    fn tp_lkna_is_exact(k in 1u32..200) {
        let (p, g) = interval();
        let c = TestCurve::sublevel(&p, &g, MaxAffine::affine(vec![1.0], 0.0)).unwrap();
        let kf = k as f64;
        prop_assert!((lkna(&c, k, 0.0).unwrap() / kf + (kf + 1.0) / (2.0 * kf)).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn hilbert_map_sees_constant_shifts(f in pieces(), c in -1.0..1.0f64, k in 1u32..12) {
        let (p, g) = interval();
        let opts = HilbertOptions::default();
        let u = DualPotential::from_fn(&p, &g, p.body().clone(), |x| f.eval(x)).unwrap();
        let v = u.shifted(c);
        prop_assert!(d1k(&u, &u, k, &opts).unwrap() < 1e-12);
        prop_assert!((d1k(&u, &v, k, &opts).unwrap() - c.abs()).abs() < 1e-7);
        prop_assert!((d1k(&v, &u, k, &opts).unwrap() - c.abs()).abs() < 1e-7);
        // Every log norm moves by −kc, so L_k moves by c N_k / V.
        let shift = lk(&v, k, &opts).unwrap() - lk(&u, k, &opts).unwrap();
        prop_assert!((shift - c * (k + 1) as f64).abs() < 1e-7, "{shift}");
    }
}
