use std::sync::Arc;

use super::RayError;
use crate::toric::{ConvexBody, DualPotential, Grid, MaxAffine, Polytope};

/// Default `t`-horizon for sampled rays.
pub const DEFAULT_HORIZON: f64 = 64.0;

/// Slope `f` of a linear ray `g_t = t f`.
#[derive(Debug, Clone)]
pub enum RaySlope {
    Pl(MaxAffine),
    Sampled(DualPotential),
}

impl RaySlope {
    pub fn eval(&self, p: &[f64]) -> f64 {
        match self {
            RaySlope::Pl(f) => f.eval(p),
            RaySlope::Sampled(f) => f.eval(p),
        }
    }

    pub fn min(&self, poly: &Polytope) -> f64 {
        match self {
            RaySlope::Pl(f) => f.min_over(poly),
            RaySlope::Sampled(f) => f.min_value(),
        }
    }

    pub fn max(&self, poly: &Polytope) -> f64 {
        match self {
            RaySlope::Pl(f) => f.max_over(poly),
            RaySlope::Sampled(f) => f.max_value(),
        }
    }
}

#[derive(Debug, Clone)]
pub enum RayData {
    /// `g_t = t f`; potentials are built on demand.
    Linear(RaySlope),
    /// One potential per `t`.
    Sampled(Vec<DualPotential>),
}

/// A ray `t ↦ r_t` from the reference potential, in dual coordinates.
#[derive(Debug, Clone)]
pub struct Ray {
    polytope: Arc<Polytope>,
    grid: Arc<Grid>,
    t_grid: Vec<f64>,
    data: RayData,
}

/// `0 = t_0 < 1 = t_j < … `: dyadic points up to the horizon.
pub fn default_t_grid(horizon: f64) -> Vec<f64> {
    let mut out = vec![0.0];
    let mut t = 0.25;
    while t < horizon {
        out.push(t);
        t = if t < 1.0 { t + 0.25 } else { t + 1.0 };
    }
    out.push(horizon);
    out
}

fn check_t_grid(t_grid: &[f64]) -> Result<(), RayError> {
    if t_grid.len() < 3 || t_grid[0] != 0.0 || t_grid.windows(2).any(|w| !(w[1] > w[0])) || !t_grid.iter().all(|t| t.is_finite()) {
        return Err(RayError::Invalid("t-grid must start at 0, increase strictly and hold at least three points".into()));
    }
    Ok(())
}

impl Ray {
    /// `g_t = t f` for a max-affine `f` on `P`.
    pub fn linear(polytope: &Arc<Polytope>, grid: &Arc<Grid>, f: MaxAffine, t_grid: Vec<f64>) -> Result<Ray, RayError> {
        if f.dim() != polytope.dim() {
            return Err(RayError::Invalid("slope dimension differs from the polytope".into()));
        }
        check_t_grid(&t_grid)?;
        Ok(Ray { polytope: polytope.clone(), grid: grid.clone(), t_grid, data: RayData::Linear(RaySlope::Pl(f)) })
    }

    /// `g_t = t f` for a full-mass sampled `f`.
    pub fn linear_sampled(f: DualPotential, t_grid: Vec<f64>) -> Result<Ray, RayError> {
        if !f.is_full_mass() {
            return Err(RayError::FiniteEnergy("ray slope must be finite on the whole polytope".into()));
        }
        check_t_grid(&t_grid)?;
        Ok(Ray { polytope: f.polytope().clone(), grid: f.grid().clone(), t_grid, data: RayData::Linear(RaySlope::Sampled(f)) })
    }

    /// `r_t ≡ 0`.
    pub fn constant(polytope: &Arc<Polytope>, grid: &Arc<Grid>, t_grid: Vec<f64>) -> Result<Ray, RayError> {
        Ray::linear(polytope, grid, MaxAffine::affine(vec![0.0; polytope.dim()], 0.0), t_grid)
    }

    /// A ray given by samples; `potentials[0]` must be the reference.
    pub fn from_samples(t_grid: Vec<f64>, potentials: Vec<DualPotential>) -> Result<Ray, RayError> {
        check_t_grid(&t_grid)?;
        if potentials.len() != t_grid.len() {
            return Err(RayError::Invalid("one potential per t is required".into()));
        }
        let first = &potentials[0];
        if potentials.iter().any(|p| !p.same_space(first)) {
            return Err(RayError::Invalid("ray potentials live on different grids".into()));
        }
        if potentials.iter().any(|p| !p.is_full_mass()) {
            return Err(RayError::FiniteEnergy("ray potentials must have full mass".into()));
        }
        if first.finite_points().iter().any(|(_, g)| g.abs() > 1e-12) {
            return Err(RayError::Invalid("ray must start at the reference potential".into()));
        }
        Ok(Ray { polytope: first.polytope().clone(), grid: first.grid().clone(), t_grid, data: RayData::Sampled(potentials) })
    }

    pub fn polytope(&self) -> &Arc<Polytope> {
        &self.polytope
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn t_grid(&self) -> &[f64] {
        &self.t_grid
    }

    pub fn data(&self) -> &RayData {
        &self.data
    }

    pub fn slope(&self) -> Option<&RaySlope> {
        match &self.data {
            RayData::Linear(s) => Some(s),
            RayData::Sampled(_) => None,
        }
    }

    pub fn horizon(&self) -> f64 {
        *self.t_grid.last().unwrap()
    }

    /// `r_t`; sampled rays only answer on their grid.
    pub fn at(&self, t: f64) -> Result<DualPotential, RayError> {
        match &self.data {
            RayData::Linear(RaySlope::Pl(f)) => {
                Ok(DualPotential::from_fn(&self.polytope, &self.grid, self.polytope.body().clone(), |p| t * f.eval(p))?)
            }
            RayData::Linear(RaySlope::Sampled(f)) => {
                if t == 0.0 {
                    Ok(DualPotential::reference(&self.polytope, &self.grid))
                } else {
                    Ok(f.scaled(t))
                }
            }
            RayData::Sampled(ps) => self
                .t_grid
                .iter()
                .position(|s| (s - t).abs() <= 1e-12 * (1.0 + t.abs()))
                .map(|i| ps[i].clone())
                .ok_or_else(|| RayError::Invalid(format!("t = {t} is not on the ray's grid"))),
        }
    }

    /// `r_t + ct`, i.e. `g_t − ct`.
    pub fn shifted(&self, c: f64) -> Ray {
        let data = match &self.data {
            RayData::Linear(RaySlope::Pl(f)) => RayData::Linear(RaySlope::Pl(f.shifted(-c))),
            RayData::Linear(RaySlope::Sampled(f)) => RayData::Linear(RaySlope::Sampled(f.shifted(c))),
            RayData::Sampled(ps) => {
                RayData::Sampled(ps.iter().zip(&self.t_grid).map(|(p, t)| p.shifted(c * t)).collect())
            }
        };
        Ray { polytope: self.polytope.clone(), grid: self.grid.clone(), t_grid: self.t_grid.clone(), data }
    }

    /// Same ray on a longer grid; only linear rays can be extended.
    pub fn with_horizon(&self, horizon: f64) -> Result<Ray, RayError> {
        match &self.data {
            RayData::Linear(_) => {
                let mut t_grid: Vec<f64> = self.t_grid.iter().copied().filter(|&t| t < horizon).collect();
                let mut t = *t_grid.last().unwrap();
                let step = (self.horizon() - self.t_grid[self.t_grid.len() - 2]).max(1.0);
                while t + step < horizon {
                    t += step;
                    t_grid.push(t);
                }
                t_grid.push(horizon);
                check_t_grid(&t_grid)?;
                Ok(Ray { t_grid, ..self.clone() })
            }
            RayData::Sampled(_) => Err(RayError::Horizon("sampled rays cannot be extended".into())),
        }
    }

    /// Per-node tail slopes `σ = (g_T − g_{T'}) / (T − T')` of the last two
    /// and the preceding two samples; `+∞` off `P`.
    pub fn tail_slopes(&self) -> (Vec<f64>, Vec<f64>) {
        match &self.data {
            RayData::Linear(s) => {
                let v: Vec<f64> = (0..self.grid.len())
                    .map(|i| if self.grid.in_polytope(i) { s.eval(&self.grid.node(i)) } else { f64::INFINITY })
                    .collect();
                (v.clone(), v)
            }
            RayData::Sampled(ps) => {
                let n = ps.len();
                let slope = |a: usize, b: usize| -> Vec<f64> {
                    let dt = self.t_grid[b] - self.t_grid[a];
                    ps[b].values().iter().zip(ps[a].values()).map(|(y, x)| (y - x) / dt).collect()
                };
                (slope(n - 2, n - 1), slope(n - 3, n - 2))
            }
        }
    }

    /// Linear slope of `sup_X r_t = −min g_t`.
    pub fn sup_slope(&self) -> f64 {
        match &self.data {
            RayData::Linear(s) => -s.min(&self.polytope),
            RayData::Sampled(ps) => {
                let n = ps.len();
                -(ps[n - 1].min_value() - ps[n - 2].min_value()) / (self.t_grid[n - 1] - self.t_grid[n - 2])
            }
        }
    }

    /// `τ⁺` of the Legendre transform, equal to the sup slope.
    pub fn tau_plus(&self) -> f64 {
        self.sup_slope()
    }

    /// `τ⁻ = −max_p σ(p)`, the largest `τ` with `r̂_τ ≡ 0`.
    pub fn tau_minus(&self) -> f64 {
        match &self.data {
            RayData::Linear(s) => -s.max(&self.polytope),
            RayData::Sampled(ps) => {
                let n = ps.len();
                let dt = self.t_grid[n - 1] - self.t_grid[n - 2];
                let last = &ps[n - 1];
                let prev = &ps[n - 2];
                let mut best = (last.vertex_values().iter().zip(prev.vertex_values()))
                    .map(|(a, b)| (a - b) / dt)
                    .fold(f64::NEG_INFINITY, f64::max);
                let (s, _) = self.tail_slopes();
                best = s.iter().copied().filter(|x| x.is_finite()).fold(best, f64::max);
                -best
            }
        }
    }

    /// Largest violation of convexity of `t ↦ r_t(x)` over the sample `xs`.
    pub fn convexity_defect(&self, xs: &[Vec<f64>]) -> Result<f64, RayError> {
        let pots: Vec<DualPotential> = self.t_grid.iter().map(|&t| self.at(t)).collect::<Result<_, _>>()?;
        let mut worst = 0.0f64;
        for x in xs {
            let r: Vec<f64> = pots.iter().map(|p| p.primal_eval(x)).collect();
            for i in 1..r.len() - 1 {
                let (t0, t1, t2) = (self.t_grid[i - 1], self.t_grid[i], self.t_grid[i + 1]);
                let chord = r[i - 1] + (r[i + 1] - r[i - 1]) * (t1 - t0) / (t2 - t0);
                worst = worst.max(r[i] - chord);
            }
        }
        Ok(worst)
    }
}

/// `{φ ≤ 0}` for a convex `φ` known at the nodes (`+∞` off `P`): hull of the
/// nonpositive nodes, the zero crossings along grid edges, and the vertices
/// of `P` where `φ ≤ 0`.
pub(crate) fn zero_sublevel(
    poly: &Polytope,
    grid: &Grid,
    phi: &[f64],
    phi_at: &dyn Fn(&[f64]) -> f64,
) -> Option<ConvexBody> {
    let mut pts: Vec<Vec<f64>> = (0..grid.len()).filter(|&i| phi[i] <= 0.0).map(|i| grid.node(i)).collect();
    for (a, b) in grid.edges() {
        let (fa, fb) = (phi[a], phi[b]);
        if fa.is_finite() && fb.is_finite() && (fa <= 0.0) != (fb <= 0.0) {
            let s = fa / (fa - fb);
            let (pa, pb) = (grid.node(a), grid.node(b));
            pts.push(pa.iter().zip(&pb).map(|(x, y)| x + s * (y - x)).collect());
        }
    }
    for v in poly.body().vertices() {
        if phi_at(&v) <= 0.0 {
            pts.push(v);
        }
    }
    ConvexBody::hull(poly.dim(), &pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> (Arc<Polytope>, Arc<Grid>) {
        let p = Arc::new(Polytope::unit_interval());
        let g = Arc::new(Grid::new(&p, 1.0 / 64.0));
        (p, g)
    }

    #[test]
    fn linear_ray_basics() {
        let (p, g) = unit();
        let r = Ray::linear(&p, &g, MaxAffine::affine(vec![1.0], 0.0), default_t_grid(8.0)).unwrap();
        assert_eq!(r.sup_slope(), 0.0);
        assert_eq!(r.tau_minus(), -1.0);
        assert!((r.at(2.0).unwrap().energy_i() + 1.0).abs() < 1e-12);
        let s = r.shifted(0.5);
        assert_eq!(s.sup_slope(), 0.5);
        assert!((s.at(2.0).unwrap().energy_i()).abs() < 1e-12);
        assert_eq!(r.with_horizon(16.0).unwrap().horizon(), 16.0);
    }

    #[test]
    fn sampled_ray_needs_reference_start() {
        let (p, g) = unit();
        let f = DualPotential::from_fn(&p, &g, p.body().clone(), |x| x[0]).unwrap();
        let ts = vec![0.0, 1.0, 2.0];
        let pots = vec![f.clone(), f.scaled(2.0), f.scaled(3.0)];
        assert!(matches!(Ray::from_samples(ts.clone(), pots), Err(RayError::Invalid(_))));
        let pots = vec![DualPotential::reference(&p, &g), f.clone(), f.scaled(2.0)];
        let r = Ray::from_samples(ts, pots).unwrap();
        assert_eq!(r.tau_minus(), -1.0);
        assert!(r.sup_slope().abs() < 1e-15);
        assert!(r.convexity_defect(&[vec![-1.0], vec![0.5], vec![3.0]]).unwrap() <= 1e-12);
    }
}
