//! Seeded generators for the randomized scenarios.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use crate::herm::{CMat, HermError, HermitianMetric, MetricFamily, SampledFamily};
use crate::raycurve::{RayError, TestCurve};
use crate::toric::{Grid, MaxAffine, Polytope};

/// Shape of a random Hilbert-type family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HilbertFamilySpec {
    pub dim: usize,
    pub s_max: f64,
    pub s_step: f64,
    /// Lower bound on the gap between the leading exponent of each diagonal
    /// entry and its other terms.
    pub gap: f64,
}

fn complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// `B B* + I` for a random complex `B`.
pub fn random_metric(rng: &mut impl Rng, n: usize) -> HermitianMetric {
    let b = CMat::from_fn(n, n, |_, _| complex(rng));
    let m = &b * b.adjoint() + CMat::identity(n, n);
    HermitianMetric::new(crate::herm::hermitian_part(&m)).expect("B B* + I is positive definite")
}

/// `H_s = A diag(d_j(s)) A*` with `1/d_j(s) = Σ_i w_ji e^{−s f_ji}`, a finite
/// Laplace transform, so `s ↦ log H*_s(w, w)` is convex. Returns the family
/// and the exact slope `Σ_j min_i f_ji` of `log det H_s`.
pub fn random_hilbert_family(rng: &mut impl Rng, spec: &HilbertFamilySpec) -> Result<(MetricFamily, f64), HermError> {
    let n = spec.dim;
    let mut terms: Vec<Vec<(f64, f64)>> = Vec::with_capacity(n);
    for _ in 0..n {
        // Leads on a quarter grid with small companion weights keep the
        // eigenvalue curves from crossing late in the window.
        let lead = rng.gen_range(-4..=4) as f64 / 4.0;
        let mut t = vec![(1.0, lead)];
        for _ in 0..rng.gen_range(0..3) {
            t.push((rng.gen_range(0.05..0.2), lead + spec.gap + rng.gen_range(0.0..1.0)));
        }
        terms.push(t);
    }
    let scale = 1.5 / (n as f64).sqrt();
    let a = CMat::identity(n, n) * Complex64::new(1.5, 0.0) + CMat::from_fn(n, n, |_, _| complex(rng) * scale);
    let exact = terms.iter().map(|t| t[0].1).sum();
    let family = SampledFamily::from_fn(spec.s_max, spec.s_step, |s| {
        let d: Vec<f64> = terms.iter().map(|t| 1.0 / t.iter().map(|(w, f)| w * (-s * f).exp()).sum::<f64>()).collect();
        HermitianMetric::congruence(&a, &d)
    })?;
    Ok((MetricFamily::Sampled(family), exact))
}

fn random_vec(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// A piecewise-linear test curve with one to three level pieces and up to
/// two value pieces whose `τ`-slopes are multiples of `1/4` in `(0, 2]`.
pub fn random_pl_curve(rng: &mut impl Rng, polytope: &Arc<Polytope>, grid: &Arc<Grid>) -> Result<TestCurve, RayError> {
    let n = polytope.dim();
    let level = (0..rng.gen_range(1..=3)).map(|_| (random_vec(rng, n), rng.gen_range(-0.5..0.5))).collect();
    let level = MaxAffine::new(n, level)?;
    let pieces = (0..rng.gen_range(0..=2))
        .map(|_| (random_vec(rng, n), rng.gen_range(-0.5..0.5), rng.gen_range(1..=8) as f64 / 4.0))
        .collect();
    TestCurve::pl(polytope, grid, level, pieces)
}
