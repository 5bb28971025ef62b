use serde::Serialize;

use super::geometry::mixed_area;
use super::{DualPotential, ToricError};

/// Mixed masses `m_j(w) = ∫ ω_w^j ∧ ω^{n−j}` for `w = u, v, max(u, v)`, and the
/// gap `Σ_j (2 m_j(max) − m_j(u) − m_j(v))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassGapReport {
    pub masses_u: Vec<f64>,
    pub masses_v: Vec<f64>,
    pub masses_max: Vec<f64>,
    pub gap: f64,
}

/// `m_j` for a body `Q` in `P`: `n! · MV(Q[j], P[n−j])`.
fn mixed_masses(q: &super::ConvexBody, p: &super::ConvexBody) -> Vec<f64> {
    match p.dim() {
        1 => vec![p.volume(), q.volume()],
        2 => vec![2.0 * p.volume(), 2.0 * mixed_area(q, p), 2.0 * q.volume()],
        d => unreachable!("dimension {d}"),
    }
}

/// Toric mass-gap functional between two potentials.
///
/// `max(u, v)` has body `conv(Q_u ∪ Q_v)`; only bodies enter the masses.
pub fn mixed_mass_gap(u: &DualPotential, v: &DualPotential) -> Result<MassGapReport, ToricError> {
    if u.polytope() != v.polytope() {
        return Err(ToricError::Mismatch);
    }
    let dim = u.dim();
    if dim > 2 {
        return Err(ToricError::UnsupportedDimension(dim));
    }
    let p = u.polytope().body();
    let max_body = u.body().hull_union(v.body());
    let masses_u = mixed_masses(u.body(), p);
    let masses_v = mixed_masses(v.body(), p);
    let masses_max = mixed_masses(&max_body, p);
    let gap = (0..=dim).map(|j| 2.0 * masses_max[j] - masses_u[j] - masses_v[j]).sum();
    Ok(MassGapReport { masses_u, masses_v, masses_max, gap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toric::{ConvexBody, Grid, Polytope};
    use std::sync::Arc;

    #[test]
    fn half_interval_gap() {
        let p = Arc::new(Polytope::unit_interval());
        let g = Arc::new(Grid::new(&p, 1.0 / 64.0));
        let u = DualPotential::model(&p, &g, ConvexBody::interval(0.0, 0.5)).unwrap();
        let v = DualPotential::reference(&p, &g);
        let r = mixed_mass_gap(&u, &v).unwrap();
        assert_eq!(r.masses_u, vec![1.0, 0.5]);
        assert_eq!(r.masses_max, vec![1.0, 1.0]);
        assert_eq!(r.gap, 0.5);
        assert_eq!(mixed_mass_gap(&v, &v).unwrap().gap, 0.0);
    }

    #[test]
    fn zeroth_mass_is_total_volume() {
        let p = Arc::new(Polytope::unit_square());
        let g = Arc::new(Grid::new(&p, 1.0 / 8.0));
        let tri = ConvexBody::hull(2, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let u = DualPotential::model(&p, &g, tri).unwrap();
        let r = mixed_mass_gap(&u, &DualPotential::reference(&p, &g)).unwrap();
        assert_eq!(r.masses_u[0], 2.0);
        assert_eq!(r.masses_max[0], 2.0);
        assert!((r.masses_u[1] - 2.0 * 1.0).abs() < 1e-14);
        assert!((r.masses_u[2] - 1.0).abs() < 1e-14);
        assert!((r.gap - (2.0 * 2.0 - 2.0 - 2.0) - (2.0 * 2.0 - 1.0 - 2.0)).abs() < 1e-14);
    }
}
