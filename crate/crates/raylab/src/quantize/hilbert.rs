use rayon::prelude::*;
use serde::Serialize;

use super::lattice::SectionSpace;
use super::QuantizeError;
use crate::quad;
use crate::toric::{DualPotential, Polytope, PrimalPl};

/// Default sharpness of the reference measure.
pub const DEFAULT_BETA: f64 = 1.0 / 1024.0;

/// `μ₀ = φ'' dx` for `φ(x) = q0 x + (q1 − q0) β⁻¹ log(1 + e^{βx})` on `P = [q0, q1]`.
///
/// The density decays like `e^{−β|x|}`, which is the integrability margin of
/// sections sitting on the boundary of a body.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceMeasure {
    pub beta: f64,
    log_scale: f64,
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl ReferenceMeasure {
    pub fn new(polytope: &Polytope, beta: f64) -> Result<Self, QuantizeError> {
        if polytope.dim() != 1 {
            return Err(QuantizeError::UnsupportedDimension(polytope.dim()));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(QuantizeError::Invalid("reference sharpness must be positive".into()));
        }
        Ok(ReferenceMeasure { beta, log_scale: (polytope.volume() * beta).ln() })
    }

    pub fn log_density(&self, x: f64) -> f64 {
        let z = self.beta * x;
        self.log_scale + z - 2.0 * softplus(z)
    }

    pub fn dlog_density(&self, x: f64) -> f64 {
        self.beta * (1.0 - 2.0 * logistic(self.beta * x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HilbertOptions {
    pub beta: f64,
    /// Relative accuracy requested from the adaptive quadrature.
    pub rel_tol: f64,
}

impl Default for HilbertOptions {
    fn default() -> Self {
        HilbertOptions { beta: DEFAULT_BETA, rel_tol: 1e-11 }
    }
}

/// Diagonal Hilbert metric `N_α = ∫ e^{αx − k u(x)} μ₀(dx)`, stored as logs;
/// `None` marks a divergent, hence excluded, section.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HilbertMap {
    pub k: u32,
    pub points: Vec<Vec<i64>>,
    pub log_norms: Vec<Option<f64>>,
}

impl HilbertMap {
    pub fn is_integrable(&self) -> bool {
        self.log_norms.iter().all(|v| v.is_some())
    }

    fn finite(&self) -> Result<Vec<f64>, QuantizeError> {
        self.log_norms
            .iter()
            .zip(&self.points)
            .map(|(v, a)| v.ok_or_else(|| QuantizeError::FiniteEnergy(format!("section {a:?} is not integrable"))))
            .collect()
    }
}

/// Window edge where the integrand drops below `e^{−CUTOFF}` of its peak.
const CUTOFF: f64 = 45.0;

/// `log ∫ e^{F}` for `F(x) = αx − k u(x) + log μ₀(x)`, concave in `x`.
fn log_norm(u: &PrimalPl, alpha: f64, k: f64, mu: &ReferenceMeasure, rel_tol: f64) -> Option<f64> {
    let (q0, q1) = u.slope_range();
    if alpha - k * q1 - mu.beta >= 0.0 || alpha - k * q0 + mu.beta <= 0.0 {
        return None;
    }
    let f = |x: f64| alpha * x - k * u.eval(x) + mu.log_density(x);
    let df = |x: f64| alpha - k * u.slope_at(x) + mu.dlog_density(x);
    let breaks = u.breakpoints();
    let lo0 = breaks.first().copied().unwrap_or(0.0).min(0.0) - 1.0;
    let hi0 = breaks.last().copied().unwrap_or(0.0).max(0.0) + 1.0;
    let (mut a, mut b) = (lo0, hi0);
    let mut step = 1.0;
    while df(a) <= 0.0 {
        a -= step;
        step *= 2.0;
    }
    step = 1.0;
    while df(b) >= 0.0 {
        b += step;
        step *= 2.0;
    }
    // F' is nonincreasing: bisect its sign change.
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if df(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let xs = 0.5 * (a + b);
    let peak = f(xs).max(f(a)).max(f(b));
    let g = |x: f64| (f(x) - peak).exp();
    let edge = |dir: f64| {
        let mut d = 1.0;
        while f(xs + dir * d) - peak > -CUTOFF {
            d *= 2.0;
        }
        xs + dir * d
    };
    let (xl, xr) = (edge(-1.0), edge(1.0));
    let mut cuts: Vec<f64> = if breaks.len() <= 256 { breaks.to_vec() } else { Vec::new() };
    cuts.push(xs);
    let rough = quad::composite(&g, xl, xr, 32).max(f64::MIN_POSITIVE);
    let body = quad::adaptive(&g, xl, xr, &cuts, rel_tol * rough);
    // Concavity bounds each tail by the tangent line at the window edge.
    let tails = g(xl) / df(xl) + g(xr) / (-df(xr));
    Some(peak + (body + tails).ln())
}

/// Hilbert map of `u` at level `k` (dimension one).
pub fn hilbert_map(u: &DualPotential, k: u32, opts: &HilbertOptions) -> Result<HilbertMap, QuantizeError> {
    let poly = u.polytope();
    let mu = ReferenceMeasure::new(poly, opts.beta)?;
    let space = SectionSpace::new(poly, k, 0.0)?;
    let primal = u.primal_pl();
    let log_norms = space
        .lattice_points
        .par_iter()
        .map(|a| log_norm(&primal, a[0] as f64, k as f64, &mu, opts.rel_tol))
        .collect();
    Ok(HilbertMap { k, points: space.lattice_points, log_norms })
}

/// `L_k(u) = −(1/(kV)) Σ_α log(N_α(u) / N_α(0))`.
pub fn lk(u: &DualPotential, k: u32, opts: &HilbertOptions) -> Result<f64, QuantizeError> {
    let reference = DualPotential::reference(u.polytope(), u.grid());
    lk_against(u, &hilbert_map(&reference, k, opts)?, opts)
}

pub(crate) fn lk_against(u: &DualPotential, reference: &HilbertMap, opts: &HilbertOptions) -> Result<f64, QuantizeError> {
    let k = reference.k;
    let h = hilbert_map(u, k, opts)?.finite()?;
    let h0 = reference.finite()?;
    let v = u.polytope().total_mass();
    let sum: f64 = h.iter().zip(&h0).map(|(a, b)| a - b).sum();
    Ok(-sum / (k as f64 * v))
}

/// `d1^k(u, v) = (1/k) d1^V(Hilb_k u, Hilb_k v)`.
pub fn d1k(u: &DualPotential, v: &DualPotential, k: u32, opts: &HilbertOptions) -> Result<f64, QuantizeError> {
    let a = hilbert_map(u, k, opts)?.finite()?;
    let b = hilbert_map(v, k, opts)?.finite()?;
    let total: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum();
    Ok(total / (a.len() as f64 * k as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toric::{ConvexBody, Grid};
    use std::sync::Arc;

    fn unit() -> (Arc<Polytope>, Arc<Grid>) {
        let p = Arc::new(Polytope::unit_interval());
        let g = Arc::new(Grid::new(&p, 1.0 / 64.0));
        (p, g)
    }

    #[test]
    fn shift_scales_entries() {
        let (p, g) = unit();
        let o = HilbertOptions::default();
        let r = DualPotential::reference(&p, &g);
        let a = hilbert_map(&r, 4, &o).unwrap();
        let b = hilbert_map(&r.shifted(0.5), 4, &o).unwrap();
        for (x, y) in a.log_norms.iter().zip(&b.log_norms) {
            assert!((y.unwrap() - x.unwrap() + 2.0).abs() < 1e-9);
        }
        assert!(lk(&r, 4, &o).unwrap().abs() < 1e-12);
        let shifted = lk(&r.shifted(0.5), 4, &o).unwrap();
        assert!((shifted - 5.0 * 0.5).abs() < 1e-9);
        assert!((d1k(&r, &r.shifted(0.5), 4, &o).unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn partial_body_excludes_sections() {
        let (p, g) = unit();
        let half = DualPotential::model(&p, &g, ConvexBody::interval(0.0, 0.5)).unwrap();
        let h = hilbert_map(&half, 4, &HilbertOptions::default()).unwrap();
        let live: Vec<bool> = h.log_norms.iter().map(|v| v.is_some()).collect();
        assert_eq!(live, vec![true, true, true, false, false]);
        assert!(matches!(lk(&half, 4, &HilbertOptions::default()), Err(QuantizeError::FiniteEnergy(_))));
    }

    #[test]
    fn planar_is_unsupported() {
        let p = Arc::new(Polytope::unit_square());
        let g = Arc::new(Grid::new(&p, 1.0 / 8.0));
        let r = DualPotential::reference(&p, &g);
        assert!(matches!(hilbert_map(&r, 2, &HilbertOptions::default()), Err(QuantizeError::UnsupportedDimension(2))));
    }
}
