use serde::Serialize;

use super::ray::Ray;
use super::RayError;

/// `d1(r1_t, r2_t) / t` at the horizon, and the last secant slope of
/// `t ↦ d1`, which bounds the limit from below.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChordalEstimate {
    pub quotient: f64,
    pub limit: f64,
    pub samples: Vec<(f64, f64)>,
}

/// Chordal distance `lim_t d1(r1_t, r2_t) / t`.
///
/// `t ↦ d1` is convex and vanishes at `t = 0`, so quotients must be
/// nondecreasing in `t`; a visible decrease means the horizon is too short
/// for the discretization.
pub fn chordal_d1c(r1: &Ray, r2: &Ray) -> Result<ChordalEstimate, RayError> {
    if r1.t_grid() != r2.t_grid() || r1.polytope() != r2.polytope() {
        return Err(RayError::Invalid("rays need the same polytope and t-grid".into()));
    }
    let mut samples = Vec::new();
    for &t in r1.t_grid() {
        let d = r1.at(t)?.d1_distance(&r2.at(t)?)?;
        samples.push((t, d));
    }
    let n = samples.len();
    let scale = 1.0 + samples.iter().fold(0.0f64, |a, s| a.max(s.1));
    let quotients: Vec<f64> = samples[1..].iter().map(|(t, d)| d / t).collect();
    if quotients.windows(2).any(|w| w[1] < w[0] - 1e-9 * scale) {
        return Err(RayError::Horizon("d1 quotients are not monotone in t".into()));
    }
    let (t0, d0) = samples[n - 2];
    let (t1, d1) = samples[n - 1];
    Ok(ChordalEstimate { quotient: d1 / t1, limit: (d1 - d0) / (t1 - t0), samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raycurve::ray::default_t_grid;
    use crate::toric::{Grid, MaxAffine, Polytope};
    use std::sync::Arc;

    #[test]
    fn shifted_ray_distance() {
        let p = Arc::new(Polytope::unit_interval());
        let g = Arc::new(Grid::new(&p, 1.0 / 64.0));
        let r = Ray::linear(&p, &g, MaxAffine::affine(vec![1.0], 0.0), default_t_grid(8.0)).unwrap();
        assert_eq!(chordal_d1c(&r, &r).unwrap().limit, 0.0);
        let e = chordal_d1c(&r, &r.shifted(0.75)).unwrap();
        assert!((e.limit - 0.75).abs() < 1e-12 && (e.quotient - 0.75).abs() < 1e-12);
        let r2 = Ray::linear(&p, &g, MaxAffine::affine(vec![2.0], 0.0), default_t_grid(8.0)).unwrap();
        assert!((chordal_d1c(&r, &r2).unwrap().limit - 0.5).abs() < 1e-12);
    }
}
