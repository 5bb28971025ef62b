use super::geometry::{hull_2d, ConvexBody};
use super::ToricError;

/// Full-dimensional moment polytope `P ⊂ R^n`, `n ∈ {1, 2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    body: ConvexBody,
}

impl Polytope {
    pub fn new(dim: usize, vertices: &[Vec<f64>]) -> Result<Self, ToricError> {
        if !(1..=2).contains(&dim) {
            return Err(ToricError::UnsupportedDimension(dim));
        }
        if vertices.iter().any(|v| v.len() != dim || v.iter().any(|x| !x.is_finite())) {
            return Err(ToricError::Invalid(format!("polytope vertices must be finite points of R^{dim}")));
        }
        let body = ConvexBody::hull(dim, vertices).ok_or_else(|| ToricError::Invalid("polytope has no vertices".into()))?;
        if !(body.volume() > 0.0) {
            return Err(ToricError::Invalid("polytope must be full-dimensional".into()));
        }
        Ok(Polytope { body })
    }

    pub fn interval(a: f64, b: f64) -> Result<Self, ToricError> {
        Polytope::new(1, &[vec![a], vec![b]])
    }

    /// `[0,1]`.
    pub fn unit_interval() -> Self {
        Polytope::interval(0.0, 1.0).unwrap()
    }

    /// `[0,1]²`.
    pub fn unit_square() -> Self {
        Polytope { body: ConvexBody::Polygon(hull_2d(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])) }
    }

    pub fn dim(&self) -> usize {
        self.body.dim()
    }

    pub fn body(&self) -> &ConvexBody {
        &self.body
    }

    pub fn volume(&self) -> f64 {
        self.body.volume()
    }

    /// `V = n! · vol(P)`, the total mass.
    pub fn total_mass(&self) -> f64 {
        factorial(self.dim()) * self.volume()
    }

    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        self.body.contains(p, tol)
    }

    /// `kP ∩ Z^n` in lexicographic order (last coordinate fastest).
    pub fn lattice_points(&self, k: u32) -> Vec<Vec<i64>> {
        let k = k as f64;
        let (lo, hi) = self.body.bbox();
        let range = |d: usize| ((k * lo[d] - 1e-9).ceil() as i64)..=((k * hi[d] + 1e-9).floor() as i64);
        let tol = 1e-9 / k.max(1.0);
        let mut out = Vec::new();
        if self.dim() == 1 {
            out.extend(range(0).map(|a| vec![a]));
        } else {
            for a in range(0) {
                for b in range(1) {
                    if self.contains(&[a as f64 / k, b as f64 / k], tol) {
                        out.push(vec![a, b]);
                    }
                }
            }
        }
        out
    }

    /// Whether every vertex of `P` lies in `(1/k) Z^n`.
    pub fn is_lattice_at(&self, k: u32) -> bool {
        self.body.vertices().iter().flatten().all(|x| {
            let y = x * k as f64;
            (y - y.round()).abs() <= 1e-9 * (1.0 + y.abs())
        })
    }
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_counts() {
        assert_eq!(Polytope::unit_interval().lattice_points(7).len(), 8);
        assert_eq!(Polytope::unit_square().lattice_points(3).len(), 16);
        let tri = Polytope::new(2, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(tri.lattice_points(4).len(), 15);
        assert!(tri.is_lattice_at(1));
        assert!(!Polytope::interval(0.0, 0.5).unwrap().is_lattice_at(1));
    }
}
