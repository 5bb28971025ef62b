use std::sync::Arc;

use super::RayError;
use crate::toric::{ConvexBody, DualPotential, Grid, MaxAffine, Polytope};

/// How a test curve produces `ψ_τ`.
#[derive(Debug, Clone)]
pub enum CurveData {
    /// `Q_τ = {level ≤ −τ}` and `g_τ = max(0, max_i (⟨a_i, p⟩ + b_i + s_i τ))`
    /// with every `s_i > 0`. No pieces gives the maximal curve `g_τ ≡ 0`.
    Pl { level: MaxAffine, pieces: Vec<(Vec<f64>, f64, f64)> },
    /// `Q_τ = conv{p_j : v_j ≥ τ}` with `g_τ ≡ 0`; pairs `(p_j, v_j)` sorted by `v_j`.
    Filtration { levels: Vec<(Vec<f64>, f64)> },
    /// Potentials on a `τ`-grid, `None` standing for `ψ_τ ≡ −∞`.
    Sampled { taus: Vec<f64>, potentials: Vec<Option<DualPotential>> },
}

/// A test curve `τ ↦ ψ_τ`, stored through its duals.
#[derive(Debug, Clone)]
pub struct TestCurve {
    polytope: Arc<Polytope>,
    grid: Arc<Grid>,
    data: CurveData,
    tau_plus: f64,
    tau_minus: f64,
}

const TAU_TOL: f64 = 1e-12;

impl TestCurve {
    /// Maximal curve `ψ_τ = P[{level ≤ −τ}]`, the Legendre transform of `g_t = t · level`.
    pub fn sublevel(polytope: &Arc<Polytope>, grid: &Arc<Grid>, level: MaxAffine) -> Result<TestCurve, RayError> {
        TestCurve::pl(polytope, grid, level, Vec::new())
    }

    pub fn pl(
        polytope: &Arc<Polytope>,
        grid: &Arc<Grid>,
        level: MaxAffine,
        pieces: Vec<(Vec<f64>, f64, f64)>,
    ) -> Result<TestCurve, RayError> {
        let n = polytope.dim();
        if level.dim() != n || pieces.iter().any(|(a, _, _)| a.len() != n) {
            return Err(RayError::Invalid("curve data dimension differs from the polytope".into()));
        }
        if pieces.iter().any(|(a, b, s)| !(*s > 0.0) || !s.is_finite() || !b.is_finite() || a.iter().any(|x| !x.is_finite())) {
            return Err(RayError::Invalid("curve pieces need finite data and a positive τ-slope".into()));
        }
        let tau_plus = -level.min_over(polytope);
        let mut tau_minus = -level.max_over(polytope);
        for (a, b, s) in &pieces {
            let top = MaxAffine::affine(a.clone(), *b).max_over(polytope);
            tau_minus = tau_minus.min(-top / s);
        }
        Ok(TestCurve { polytope: polytope.clone(), grid: grid.clone(), data: CurveData::Pl { level, pieces }, tau_plus, tau_minus })
    }

    /// Filtration curve from normalized points `p_j` and thresholds `v_j`.
    pub fn from_levels(polytope: &Arc<Polytope>, grid: &Arc<Grid>, mut levels: Vec<(Vec<f64>, f64)>) -> Result<TestCurve, RayError> {
        if levels.is_empty() || levels.iter().any(|(p, v)| p.len() != polytope.dim() || !v.is_finite()) {
            return Err(RayError::Invalid("filtration levels must be finite points of the polytope's dimension".into()));
        }
        levels.sort_by(|a, b| a.1.total_cmp(&b.1));
        let pts: Vec<Vec<f64>> = levels.iter().map(|l| l.0.clone()).collect();
        let all = ConvexBody::hull(polytope.dim(), &pts).unwrap();
        if !all.approx_eq(polytope.body(), 1e-9) {
            return Err(RayError::Invalid("the points must span the whole polytope".into()));
        }
        let tau_minus = levels[0].1;
        let tau_plus = levels.last().unwrap().1;
        Ok(TestCurve { polytope: polytope.clone(), grid: grid.clone(), data: CurveData::Filtration { levels }, tau_plus, tau_minus })
    }

    /// A curve sampled on a `τ`-grid.
    pub fn from_samples(taus: Vec<f64>, potentials: Vec<Option<DualPotential>>) -> Result<TestCurve, RayError> {
        if taus.len() != potentials.len() || taus.is_empty() || taus.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(RayError::Invalid("τ-grid must increase strictly with one entry per τ".into()));
        }
        let first = potentials
            .iter()
            .flatten()
            .next()
            .ok_or_else(|| RayError::Invalid("test curve is −∞ everywhere".into()))?
            .clone();
        if potentials.iter().flatten().any(|p| !p.same_space(&first)) {
            return Err(RayError::Invalid("curve potentials live on different grids".into()));
        }
        let tol = 1e-9;
        let mut last: Option<&DualPotential> = None;
        let mut ended = false;
        let mut tau_plus = f64::NEG_INFINITY;
        for (tau, pot) in taus.iter().zip(&potentials) {
            match pot {
                None => ended = true,
                Some(p) => {
                    if ended {
                        return Err(RayError::Invalid(format!("curve returns from −∞ at τ = {tau}")));
                    }
                    if let Some(prev) = last {
                        let shrinks = p.body().vertices().iter().all(|v| prev.body().contains(v, tol));
                        if !shrinks || !prev.dominates(p, tol) {
                            return Err(RayError::Invalid(format!("curve is not decreasing at τ = {tau}")));
                        }
                    }
                    last = Some(p);
                    tau_plus = *tau;
                }
            }
        }
        let mut tau_minus = f64::NEG_INFINITY;
        for (tau, pot) in taus.iter().zip(&potentials) {
            match pot {
                Some(p) if p.is_full_mass() && p.finite_points().iter().all(|(_, g)| g.abs() <= 1e-12) => tau_minus = *tau,
                _ => break,
            }
        }
        Ok(TestCurve {
            polytope: first.polytope().clone(),
            grid: first.grid().clone(),
            data: CurveData::Sampled { taus, potentials },
            tau_plus,
            tau_minus,
        })
    }

    pub fn polytope(&self) -> &Arc<Polytope> {
        &self.polytope
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn data(&self) -> &CurveData {
        &self.data
    }

    /// Largest `τ` with `ψ_τ ≢ −∞`.
    pub fn tau_plus(&self) -> f64 {
        self.tau_plus
    }

    /// Largest `τ` with `ψ_τ ≡ 0`; `−∞` if none is known.
    pub fn tau_minus(&self) -> f64 {
        self.tau_minus
    }

    pub fn is_bounded(&self) -> bool {
        self.tau_minus.is_finite()
    }

    /// Whether every `ψ_τ` is a model potential.
    pub fn is_maximal(&self) -> bool {
        match &self.data {
            CurveData::Pl { pieces, .. } => pieces.is_empty(),
            CurveData::Filtration { .. } => true,
            CurveData::Sampled { potentials, .. } => {
                potentials.iter().flatten().all(|p| p.finite_points().iter().all(|(_, g)| g.abs() <= 1e-12))
            }
        }
    }

    /// `τ`-grid: the stored one, or a uniform grid of the given step from
    /// just below `τ⁻` through `τ⁺`.
    pub fn taus(&self, step: f64) -> Vec<f64> {
        if let CurveData::Sampled { taus, .. } = &self.data {
            return taus.clone();
        }
        let lo = ((self.tau_minus / step).floor() - 1.0) * step;
        let n = ((self.tau_plus - lo) / step).floor() as usize;
        let mut out: Vec<f64> = (0..=n).map(|i| lo + i as f64 * step).collect();
        if (out.last().unwrap() - self.tau_plus).abs() > TAU_TOL {
            out.push(self.tau_plus);
        }
        out
    }

    fn sampled_index(&self, tau: f64) -> Result<Option<usize>, RayError> {
        let CurveData::Sampled { taus, potentials } = &self.data else { unreachable!() };
        if tau > self.tau_plus + TAU_TOL {
            return Ok(None);
        }
        if tau < taus[0] - TAU_TOL {
            if self.tau_minus.is_finite() {
                return Ok(Some(0));
            }
            return Err(RayError::Invalid(format!("τ = {tau} lies below the sampled range")));
        }
        let i = taus
            .iter()
            .position(|t| (t - tau).abs() <= TAU_TOL * (1.0 + tau.abs()))
            .ok_or_else(|| RayError::Invalid(format!("τ = {tau} is not on the curve's grid")))?;
        Ok(potentials[i].as_ref().map(|_| i))
    }

    /// The closed body `Q_τ`, `None` when `ψ_τ ≡ −∞`.
    pub fn body_at(&self, tau: f64) -> Result<Option<ConvexBody>, RayError> {
        Ok(match &self.data {
            CurveData::Pl { level, .. } => level.sublevel(&self.polytope, -tau),
            CurveData::Filtration { levels } => {
                let start = levels.partition_point(|l| l.1 < tau - TAU_TOL * (1.0 + tau.abs()));
                let pts: Vec<Vec<f64>> = levels[start..].iter().map(|l| l.0.clone()).collect();
                ConvexBody::hull(self.polytope.dim(), &pts)
            }
            CurveData::Sampled { potentials, .. } => {
                self.sampled_index(tau)?.map(|i| potentials[i].as_ref().unwrap().body().clone())
            }
        })
    }

    /// `ψ_τ`, `None` standing for `−∞`.
    pub fn at(&self, tau: f64) -> Result<Option<DualPotential>, RayError> {
        match &self.data {
            CurveData::Pl { pieces, .. } => {
                let Some(body) = self.body_at(tau)? else { return Ok(None) };
                let g = |p: &[f64]| {
                    pieces
                        .iter()
                        .map(|(a, b, s)| a.iter().zip(p).map(|(x, y)| x * y).sum::<f64>() + b + s * tau)
                        .fold(0.0, f64::max)
                };
                Ok(Some(DualPotential::from_fn(&self.polytope, &self.grid, body, g)?))
            }
            CurveData::Filtration { .. } => match self.body_at(tau)? {
                Some(body) => Ok(Some(DualPotential::model(&self.polytope, &self.grid, body)?)),
                None => Ok(None),
            },
            CurveData::Sampled { potentials, .. } => Ok(self.sampled_index(tau)?.map(|i| potentials[i].clone().unwrap())),
        }
    }

    /// `mass(ψ_τ) = n! vol(Q_τ)`, zero when `ψ_τ ≡ −∞`.
    pub fn mass_at(&self, tau: f64) -> Result<f64, RayError> {
        Ok(self.body_at(tau)?.map_or(0.0, |b| crate::toric::factorial(self.polytope.dim()) * b.volume()))
    }

    /// `sup{τ : p ∈ Q_τ}` where membership allows an excess `margin` over
    /// each facet; `−∞` if `p` is never a member.
    pub fn membership_threshold(&self, p: &[f64], margin: f64) -> f64 {
        let tol = margin + 1e-12;
        if !self.polytope.contains(p, tol) {
            return f64::NEG_INFINITY;
        }
        match &self.data {
            CurveData::Pl { level, .. } => level
                .pieces()
                .iter()
                .map(|(a, b)| {
                    let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
                    -(a.iter().zip(p).map(|(x, y)| x * y).sum::<f64>() + b) + margin * norm
                })
                .fold(f64::INFINITY, f64::min),
            CurveData::Filtration { levels } => {
                let mut values: Vec<f64> = levels.iter().map(|l| l.1).collect();
                values.dedup();
                let inside = |v: f64| self.body_at(v).ok().flatten().is_some_and(|b| b.contains(p, tol));
                // Bodies shrink as the threshold grows: bisect on the distinct thresholds.
                let (mut lo, mut hi) = (0usize, values.len());
                if !inside(values[0]) {
                    return f64::NEG_INFINITY;
                }
                while hi - lo > 1 {
                    let mid = (lo + hi) / 2;
                    if inside(values[mid]) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                values[lo]
            }
            CurveData::Sampled { taus, potentials } => {
                let mut best = f64::NEG_INFINITY;
                for (t, pot) in taus.iter().zip(potentials) {
                    match pot {
                        Some(q) if q.body().contains(p, tol) => best = *t,
                        _ => break,
                    }
                }
                best
            }
        }
    }

    /// `ψ_{τ−c}`: the curve moved right by `c`.
    pub fn shifted(&self, c: f64) -> TestCurve {
        let data = match &self.data {
            CurveData::Pl { level, pieces } => CurveData::Pl {
                level: level.shifted(-c),
                pieces: pieces.iter().map(|(a, b, s)| (a.clone(), b - s * c, *s)).collect(),
            },
            CurveData::Filtration { levels } => {
                CurveData::Filtration { levels: levels.iter().map(|(p, v)| (p.clone(), v + c)).collect() }
            }
            CurveData::Sampled { taus, potentials } => {
                CurveData::Sampled { taus: taus.iter().map(|t| t + c).collect(), potentials: potentials.clone() }
            }
        };
        TestCurve {
            polytope: self.polytope.clone(),
            grid: self.grid.clone(),
            data,
            tau_plus: self.tau_plus + c,
            tau_minus: self.tau_minus + c,
        }
    }
}

/// `(τ, mass(ψ_τ))` over the given grid.
pub fn mass_curve(curve: &TestCurve, taus: &[f64]) -> Result<Vec<(f64, f64)>, RayError> {
    taus.iter().map(|&t| Ok((t, curve.mass_at(t)?))).collect()
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
    fn sublevel_masses() {
        let (p, g) = unit();
        let c = TestCurve::sublevel(&p, &g, MaxAffine::affine(vec![1.0], 0.0)).unwrap();
        assert_eq!((c.tau_minus(), c.tau_plus()), (-1.0, 0.0));
        let m = mass_curve(&c, &[-2.0, -1.0, -0.25, 0.0, 0.5]).unwrap();
        assert_eq!(m, vec![(-2.0, 1.0), (-1.0, 1.0), (-0.25, 0.25), (0.0, 0.0), (0.5, 0.0)]);
        assert!(c.at(0.5).unwrap().is_none());
        assert_eq!(c.membership_threshold(&[0.25], 0.0), -0.25);
    }

    #[test]
    fn pl_pieces_and_shift() {
        let (p, g) = unit();
        let c = TestCurve::pl(&p, &g, MaxAffine::affine(vec![1.0], 0.0), vec![(vec![1.0], 0.5, 1.0)]).unwrap();
        assert_eq!(c.tau_minus(), -1.5);
        let psi = c.at(-1.0).unwrap().unwrap();
        assert!((psi.eval(&[0.75]) - 0.25).abs() < 1e-12);
        let s = c.shifted(1.0);
        let q = s.at(0.0).unwrap().unwrap();
        assert!((q.eval(&[0.75]) - 0.25).abs() < 1e-12);
        assert_eq!(s.tau_plus(), 1.0);
    }

    #[test]
    fn sampled_curve_validation() {
        let (p, g) = unit();
        let full = DualPotential::reference(&p, &g);
        let half = DualPotential::model(&p, &g, ConvexBody::interval(0.0, 0.5)).unwrap();
        let c = TestCurve::from_samples(vec![-1.0, -0.5, 0.0, 0.5], vec![Some(full.clone()), Some(half.clone()), Some(half.clone()), None])
            .unwrap();
        assert_eq!((c.tau_minus(), c.tau_plus()), (-1.0, 0.0));
        assert_eq!(c.mass_at(-0.5).unwrap(), 0.5);
        assert_eq!(c.membership_threshold(&[0.75], 0.0), -1.0);
        assert!(TestCurve::from_samples(vec![0.0, 1.0], vec![Some(half), Some(full)]).is_err());
    }
}
