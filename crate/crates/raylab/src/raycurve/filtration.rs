use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::curve::TestCurve;
use super::RayError;
use crate::toric::{Grid, Polytope};

/// Weights `λ_α` on the lattice points `α ∈ kP ∩ Z^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToricFiltration {
    pub k: u32,
    pub points: Vec<Vec<i64>>,
    pub weights: Vec<f64>,
}

impl ToricFiltration {
    /// `λ_α = w(α, k)` on every lattice point of `kP`.
    pub fn from_fn(polytope: &Polytope, k: u32, w: impl Fn(&[i64], u32) -> f64) -> ToricFiltration {
        let points = polytope.lattice_points(k);
        let weights = points.iter().map(|a| w(a, k)).collect();
        ToricFiltration { k, points, weights }
    }

    fn levels(&self, polytope: &Polytope) -> Result<Vec<(Vec<f64>, f64)>, RayError> {
        if self.k == 0 || self.points.len() != self.weights.len() {
            return Err(RayError::Invalid("filtration needs k ≥ 1 and one weight per point".into()));
        }
        let lattice = polytope.lattice_points(self.k);
        let expected: HashSet<&Vec<i64>> = lattice.iter().collect();
        let given: HashSet<&Vec<i64>> = self.points.iter().collect();
        if given.len() != self.points.len() || given != expected {
            return Err(RayError::Invalid(format!("points must enumerate kP ∩ Z^n exactly once for k = {}", self.k)));
        }
        if !polytope.is_lattice_at(self.k) {
            return Err(RayError::Invalid(format!("vertices of P are not in (1/{})Z^n", self.k)));
        }
        let k = self.k as f64;
        Ok(self
            .points
            .iter()
            .zip(&self.weights)
            .map(|(a, l)| (a.iter().map(|x| *x as f64 / k).collect(), l / k))
            .collect())
    }
}

/// Partial Bergman test curve `ψ_τ` with body `conv{α/k : λ_α ≥ kτ}` and `g ≡ 0`.
pub fn from_filtration(polytope: &Arc<Polytope>, grid: &Arc<Grid>, w: &ToricFiltration) -> Result<TestCurve, RayError> {
    TestCurve::from_levels(polytope, grid, w.levels(polytope)?)
}

/// Maximum of the curves at `k0, 2k0, …, 2^d k0`; bodies grow with `k` for
/// multiplicative weights, approximating the Fekete limit.
pub fn fekete_curve(
    polytope: &Arc<Polytope>,
    grid: &Arc<Grid>,
    w: impl Fn(&[i64], u32) -> f64,
    k0: u32,
    doublings: u32,
) -> Result<TestCurve, RayError> {
    let mut levels = Vec::new();
    for j in 0..=doublings {
        let f = ToricFiltration::from_fn(polytope, k0 << j, &w);
        levels.extend(f.levels(polytope)?);
    }
    TestCurve::from_levels(polytope, grid, levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toric::ConvexBody;

    #[test]
    fn small_filtration_body() {
        let p = Arc::new(Polytope::unit_interval());
        let g = Arc::new(Grid::new(&p, 1.0 / 64.0));
        let w = ToricFiltration { k: 2, points: vec![vec![0], vec![1], vec![2]], weights: vec![0.0, 1.0, 2.0] };
        let c = from_filtration(&p, &g, &w).unwrap();
        assert_eq!(c.body_at(0.5).unwrap().unwrap(), ConvexBody::interval(0.5, 1.0));
        assert_eq!((c.tau_minus(), c.tau_plus()), (0.0, 1.0));
        assert!(c.body_at(1.5).unwrap().is_none());
        let bad = ToricFiltration { k: 2, points: vec![vec![0], vec![2]], weights: vec![0.0, 1.0] };
        assert!(from_filtration(&p, &g, &bad).is_err());
    }

    #[test]
    fn zero_weights() {
        let p = Arc::new(Polytope::unit_square());
        let g = Arc::new(Grid::new(&p, 1.0 / 8.0));
        let c = from_filtration(&p, &g, &ToricFiltration::from_fn(&p, 3, |_, _| 0.0)).unwrap();
        assert_eq!(c.mass_at(0.0).unwrap(), 2.0);
        assert_eq!(c.mass_at(0.1).unwrap(), 0.0);
        assert!(c.is_bounded() && c.is_maximal());
    }
}
