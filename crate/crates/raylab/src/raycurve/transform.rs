use super::curve::{CurveData, TestCurve};
use super::ray::{zero_sublevel, Ray, RayData, RaySlope};
use super::RayError;
use crate::toric::{DualPotential, Grid, Polytope};

/// `r̂_τ`: dual `ĝ_τ(p) = sup_t (g_t(p) + tτ)`, `None` for `−∞`.
///
/// A node belongs to the body when the tail slope `σ(p) + τ ≤ 0`. For sampled
/// rays the tail must be affine wherever it still increases, otherwise the
/// horizon is reported too short.
pub fn hat_transform(ray: &Ray, tau: f64) -> Result<Option<DualPotential>, RayError> {
    let poly = ray.polytope();
    let grid = ray.grid();
    match ray.data() {
        RayData::Linear(RaySlope::Pl(f)) => match f.sublevel(poly, -tau) {
            Some(body) => Ok(Some(DualPotential::model(poly, grid, body)?)),
            None => Ok(None),
        },
        RayData::Linear(RaySlope::Sampled(f)) => {
            let phi: Vec<f64> = f.values().iter().map(|v| v + tau).collect();
            match zero_sublevel(poly, grid, &phi, &|p| f.eval(p) + tau) {
                Some(body) => Ok(Some(DualPotential::model(poly, grid, body)?)),
                None => Ok(None),
            }
        }
        RayData::Sampled(pots) => {
            let ts = ray.t_grid();
            let (last, prev) = ray.tail_slopes();
            let scale = 1.0 + tau.abs() + last.iter().filter(|x| x.is_finite()).fold(0.0f64, |a, x| a.max(x.abs()));
            let tol = 1e-9 * scale;
            let mut phi = vec![f64::INFINITY; grid.len()];
            let mut values = vec![f64::INFINITY; grid.len()];
            for i in 0..grid.len() {
                if !last[i].is_finite() {
                    continue;
                }
                phi[i] = last[i] + tau;
                if phi[i] > tol && (last[i] - prev[i]).abs() > tol {
                    return Err(RayError::Horizon(format!(
                        "sup over t still increasing at t = {} for p = {:?}",
                        ray.horizon(),
                        grid.node(i)
                    )));
                }
                if phi[i] <= tol {
                    phi[i] = phi[i].min(0.0);
                }
                values[i] = pots.iter().zip(ts).map(|(g, t)| g.values()[i] + t * tau).fold(f64::NEG_INFINITY, f64::max);
            }
            let n = ts.len();
            let vertex_phi = |p: &[f64]| {
                let s = (pots[n - 1].eval(p) - pots[n - 2].eval(p)) / (ts[n - 1] - ts[n - 2]) + tau;
                if s <= tol {
                    s.min(0.0)
                } else {
                    s
                }
            };
            let Some(body) = zero_sublevel(poly, grid, &phi, &vertex_phi) else { return Ok(None) };
            let vertex_values = body
                .vertices()
                .iter()
                .map(|v| pots.iter().zip(ts).map(|(g, t)| g.eval(v) + t * tau).fold(f64::NEG_INFINITY, f64::max))
                .collect();
            Ok(Some(DualPotential::from_parts(poly, grid, body, values, Some(vertex_values))?))
        }
    }
}

/// Legendre transform of a whole ray on a `τ`-grid. Linear max-affine rays
/// map to exact sublevel curves.
pub fn hat_curve(ray: &Ray, taus: &[f64]) -> Result<TestCurve, RayError> {
    if let RayData::Linear(RaySlope::Pl(f)) = ray.data() {
        return TestCurve::sublevel(ray.polytope(), ray.grid(), f.clone());
    }
    let pots = taus.iter().map(|&t| hat_transform(ray, t)).collect::<Result<Vec<_>, _>>()?;
    TestCurve::from_samples(taus.to_vec(), pots)
}

/// `ǧ_t(p) = inf_τ (g_τ(p) − tτ)` at a single point.
fn check_value(curve: &TestCurve, p: &[f64], t: f64) -> f64 {
    match curve.data() {
        CurveData::Pl { level, pieces } => {
            let top = -level.eval(p);
            if t == 0.0 {
                return 0.0;
            }
            // Convex piecewise-linear in τ on (−∞, top]: the inf sits at a kink or at `top`.
            let lines: Vec<(f64, f64)> = std::iter::once((0.0, 0.0))
                .chain(pieces.iter().map(|(a, b, s)| (a.iter().zip(p).map(|(x, y)| x * y).sum::<f64>() + b, *s)))
                .collect();
            let g = |tau: f64| lines.iter().map(|(c, s)| c + s * tau).fold(f64::NEG_INFINITY, f64::max);
            let mut best = g(top) - t * top;
            for i in 0..lines.len() {
                for j in i + 1..lines.len() {
                    let (ci, si) = lines[i];
                    let (cj, sj) = lines[j];
                    if si != sj {
                        let tau = (cj - ci) / (si - sj);
                        if tau <= top {
                            best = best.min(g(tau) - t * tau);
                        }
                    }
                }
            }
            best
        }
        CurveData::Filtration { .. } => -t * curve.membership_threshold(p, 0.0),
        CurveData::Sampled { taus, potentials } => {
            let mut best = f64::INFINITY;
            for (tau, pot) in taus.iter().zip(potentials) {
                if let Some(q) = pot {
                    best = best.min(q.eval(p) - t * tau);
                }
            }
            best
        }
    }
}

/// `ψ̌_t`, a full-mass potential for every `t ≥ 0`.
pub fn check_transform(curve: &TestCurve, t: f64) -> Result<DualPotential, RayError> {
    if t < 0.0 {
        return Err(RayError::Invalid(format!("t = {t} must be nonnegative")));
    }
    if !curve.is_bounded() {
        return Err(RayError::Invalid("check transform needs a bounded curve".into()));
    }
    match curve.data() {
        CurveData::Pl { .. } => {
            let poly = curve.polytope();
            Ok(DualPotential::from_fn(poly, curve.grid(), poly.body().clone(), |p| check_value(curve, p, t))?)
        }
        // A pointwise inf over τ need not be convex; the dual of the primal
        // sup is its lower convex envelope.
        _ => enveloped(curve, |p| check_value(curve, p, t)),
    }
}

/// Lower convex envelope of `f` on `P`, sampled at nodes and vertices.
fn enveloped(curve: &TestCurve, f: impl Fn(&[f64]) -> f64) -> Result<DualPotential, RayError> {
    let poly = curve.polytope();
    let grid = curve.grid();
    let mut values: Vec<f64> =
        (0..grid.len()).map(|i| if grid.in_polytope(i) { f(&grid.node(i)) } else { f64::INFINITY }).collect();
    let mut vertex_values: Vec<f64> = poly.body().vertices().iter().map(|v| f(v)).collect();
    lower_envelope(grid, poly, &mut values, &mut vertex_values);
    Ok(DualPotential::from_parts(poly, grid, poly.body().clone(), values, Some(vertex_values))?)
}

/// Replace node and vertex values by their lower convex envelope: the exact
/// hull in dimension one, midpoint relaxation along grid triples in dimension two.
fn lower_envelope(grid: &Grid, poly: &Polytope, values: &mut [f64], vertex_values: &mut [f64]) {
    if grid.dim() == 1 {
        let mut pts: Vec<[f64; 2]> = (0..grid.len())
            .filter(|&i| values[i].is_finite())
            .map(|i| [grid.node(i)[0], values[i]])
            .chain(poly.body().vertices().iter().zip(vertex_values.iter()).map(|(v, &g)| [v[0], g]))
            .collect();
        pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        pts.dedup_by(|a, b| (a[0] - b[0]).abs() <= 1e-12);
        let mut hull: Vec<[f64; 2]> = Vec::new();
        for p in pts {
            while hull.len() >= 2 {
                let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
                if (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        let at = |x: f64| {
            let j = hull.partition_point(|h| h[0] < x).clamp(1, hull.len().max(2) - 1);
            if hull.len() == 1 {
                return hull[0][1];
            }
            let (a, b) = (hull[j - 1], hull[j]);
            a[1] + (b[1] - a[1]) * (x - a[0]) / (b[0] - a[0])
        };
        for (i, v) in values.iter_mut().enumerate() {
            if v.is_finite() {
                *v = at(grid.node(i)[0]);
            }
        }
        for (v, g) in poly.body().vertices().iter().zip(vertex_values.iter_mut()) {
            *g = at(v[0]);
        }
        return;
    }
    let triples = grid.triples();
    let scale = 1.0 + values.iter().filter(|v| v.is_finite()).fold(0.0f64, |a, v| a.max(v.abs()));
    for _ in 0..100_000 {
        let mut changed = 0.0f64;
        for &(a, b, c) in &triples {
            let mid = 0.5 * (values[a] + values[c]);
            if mid.is_finite() && values[b] > mid {
                changed = changed.max(values[b] - mid);
                values[b] = mid;
            }
        }
        if changed <= 1e-13 * scale {
            break;
        }
    }
}

/// The ray `t ↦ ψ̌_t` on `t_grid`. Maximal curves give linear rays.
pub fn check_ray(curve: &TestCurve, t_grid: &[f64]) -> Result<Ray, RayError> {
    let poly = curve.polytope();
    let grid = curve.grid();
    match curve.data() {
        CurveData::Pl { level, pieces } if pieces.is_empty() => Ray::linear(poly, grid, level.clone(), t_grid.to_vec()),
        CurveData::Filtration { .. } => {
            let f = enveloped(curve, |p| -curve.membership_threshold(p, 0.0))?;
            Ray::linear_sampled(f, t_grid.to_vec())
        }
        _ => {
            let pots = t_grid.iter().map(|&t| check_transform(curve, t)).collect::<Result<Vec<_>, _>>()?;
            Ray::from_samples(t_grid.to_vec(), pots)
        }
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::raycurve::ray::default_t_grid;
    use crate::toric::{ConvexBody, Grid, MaxAffine, Polytope};
    use std::sync::Arc;

    fn unit() -> (Arc<Polytope>, Arc<Grid>) {
        let p = Arc::new(Polytope::unit_interval());
        let g = Arc::new(Grid::new(&p, 1.0 / 64.0));
        (p, g)
    }

    #[test]
    fn hat_of_tp() {
        let (p, g) = unit();
        let r = Ray::linear(&p, &g, MaxAffine::affine(vec![1.0], 0.0), default_t_grid(8.0)).unwrap();
        let h = hat_transform(&r, -0.5).unwrap().unwrap();
        assert_eq!(h.body(), &ConvexBody::interval(0.0, 0.5));
        assert!(hat_transform(&r, 0.1).unwrap().is_none());
    }

    #[test]
    fn sampled_hat_matches_exact() {
        let (p, g) = unit();
        let f = DualPotential::from_fn(&p, &g, p.body().clone(), |x| x[0]).unwrap();
        let ts = default_t_grid(8.0);
        let pots: Vec<DualPotential> =
            ts.iter().map(|&t| if t == 0.0 { DualPotential::reference(&p, &g) } else { f.scaled(t) }).collect();
        let r = Ray::from_samples(ts, pots).unwrap();
        let h = hat_transform(&r, -0.3).unwrap().unwrap();
        assert!(h.body().approx_eq(&ConvexBody::interval(0.0, 0.3), 1e-9));
        assert!(h.finite_points().iter().all(|(_, v)| v.abs() < 1e-12));
    }

    #[test]
    fn check_of_pl_curve() {
        let (p, g) = unit();
        let c = TestCurve::pl(&p, &g, MaxAffine::affine(vec![1.0], 0.0), vec![(vec![0.0], 1.0, 1.0)]).unwrap();
        // G(τ) = max(0, 1 + τ) on τ ≤ −1/2: for t = 2 the inf sits at the end τ = −1/2,
        // for t = 1/2 at the kink τ = −1.
        assert!((check_value(&c, &[0.5], 2.0) - 1.5).abs() < 1e-15);
        assert!((check_value(&c, &[0.5], 0.5) - 0.5).abs() < 1e-15);
    }
}
