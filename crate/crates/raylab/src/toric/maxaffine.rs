use super::geometry::ConvexBody;
use super::{Polytope, ToricError};

/// Convex piecewise-affine function `f(p) = max_i (⟨a_i, p⟩ + b_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxAffine {
    dim: usize,
    pieces: Vec<(Vec<f64>, f64)>,
}

impl MaxAffine {
    pub fn new(dim: usize, pieces: Vec<(Vec<f64>, f64)>) -> Result<Self, ToricError> {
        if pieces.is_empty() {
            return Err(ToricError::Invalid("max-affine function needs at least one piece".into()));
        }
        if pieces.iter().any(|(a, b)| a.len() != dim || !b.is_finite() || a.iter().any(|x| !x.is_finite())) {
            return Err(ToricError::Invalid(format!("pieces must be finite affine maps on R^{dim}")));
        }
        Ok(MaxAffine { dim, pieces })
    }

    /// A single affine piece.
    pub fn affine(a: Vec<f64>, b: f64) -> Self {
        MaxAffine { dim: a.len(), pieces: vec![(a, b)] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[(Vec<f64>, f64)] {
        &self.pieces
    }

    pub fn eval(&self, p: &[f64]) -> f64 {
        self.pieces
            .iter()
            .map(|(a, b)| a.iter().zip(p).map(|(x, y)| x * y).sum::<f64>() + b)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `f + c`.
    pub fn shifted(&self, c: f64) -> Self {
        MaxAffine { dim: self.dim, pieces: self.pieces.iter().map(|(a, b)| (a.clone(), b + c)).collect() }
    }

    /// `s · f` for `s ≥ 0`.
    pub fn scaled(&self, s: f64) -> Self {
        MaxAffine {
            dim: self.dim,
            pieces: self.pieces.iter().map(|(a, b)| (a.iter().map(|x| s * x).collect(), s * b)).collect(),
        }
    }

    /// Exact sublevel set `{p ∈ P : f(p) ≤ c}`.
    pub fn sublevel(&self, poly: &Polytope, c: f64) -> Option<ConvexBody> {
        let mut body = poly.body().clone();
        for (a, b) in &self.pieces {
            body = body.clip_halfspace(a, c - b)?;
        }
        Some(body)
    }

    pub fn max_over(&self, poly: &Polytope) -> f64 {
        poly.body().vertices().iter().map(|v| self.eval(v)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// `min_P f`, by bisection on nonemptiness of sublevel sets.
    pub fn min_over(&self, poly: &Polytope) -> f64 {
        let verts = poly.body().vertices();
        let mut hi = verts.iter().map(|v| self.eval(v)).fold(f64::INFINITY, f64::min);
        let mut lo = self
            .pieces
            .iter()
            .map(|(a, b)| {
                verts.iter().map(|v| a.iter().zip(v).map(|(x, y)| x * y).sum::<f64>() + b).fold(f64::INFINITY, f64::min)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        for _ in 0..200 {
            if hi - lo <= 1e-15 * (1.0 + hi.abs()) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if self.sublevel(poly, mid).is_some() {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hinge_sublevels() {
        let p = Polytope::unit_interval();
        let f = MaxAffine::new(1, vec![(vec![-0.5], 0.0), (vec![2.0], -1.25)]).unwrap();
        assert!((f.min_over(&p) + 0.25).abs() < 1e-14);
        assert_eq!(f.max_over(&p), 0.75);
        let s = f.sublevel(&p, 0.0).unwrap();
        assert_eq!(s, ConvexBody::interval(0.0, 0.625));
        assert!(f.sublevel(&p, -0.3).is_none());
    }

    #[test]
    fn planar_min() {
        let p = Polytope::unit_square();
        let f = MaxAffine::new(2, vec![(vec![1.0, 0.0], -0.5), (vec![-1.0, 0.0], 0.5), (vec![0.0, 1.0], -0.75)]).unwrap();
        assert!(f.min_over(&p).abs() < 1e-12);
        let s = f.sublevel(&p, 0.25).unwrap();
        assert!((s.volume() - 0.5).abs() < 1e-12);
    }
}
