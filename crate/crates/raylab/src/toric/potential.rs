use std::sync::Arc;

use super::geometry::ConvexBody;
use super::polytope::factorial;
use super::{Grid, Polytope, ToricError};

/// A convex dual function `g` on a closed body `Q ⊆ P`, `+∞` off `Q`.
///
/// The primal potential is `u(x) = sup_{p ∈ Q} (⟨p, x⟩ − g(p))`. `g` is stored
/// at the grid nodes inside `Q` and at the vertices of `Q`; in between it is
/// the piecewise-linear interpolant on the grid triangulation.
#[derive(Debug, Clone)]
pub struct DualPotential {
    polytope: Arc<Polytope>,
    grid: Arc<Grid>,
    body: ConvexBody,
    values: Vec<f64>,
    vertex_values: Vec<f64>,
    /// Dimension one: sorted `(p, g(p))` over the body, vertices included.
    knots: Vec<(f64, f64)>,
}

impl PartialEq for DualPotential {
    fn eq(&self, other: &Self) -> bool {
        self.polytope == other.polytope
            && self.body == other.body
            && self.values == other.values
            && self.vertex_values == other.vertex_values
    }
}

/// Relative tolerance for the discrete convexity check.
const CONVEXITY_TOL: f64 = 1e-9;

impl DualPotential {
    fn membership_tol(grid: &Grid) -> f64 {
        1e-9 * grid.resolution()
    }

    /// Evaluate `f` on the nodes and vertices of `body`.
    pub fn from_fn(
        polytope: &Arc<Polytope>,
        grid: &Arc<Grid>,
        body: ConvexBody,
        f: impl Fn(&[f64]) -> f64,
    ) -> Result<Self, ToricError> {
        let tol = Self::membership_tol(grid);
        let values = (0..grid.len())
            .map(|i| {
                let p = grid.node(i);
                if grid.in_polytope(i) && body.contains(&p, tol) {
                    f(&p)
                } else {
                    f64::INFINITY
                }
            })
            .collect();
        let vertex_values = body.vertices().iter().map(|v| f(v)).collect();
        Self::assemble(polytope, grid, body, values, vertex_values)
    }

    /// Build from node values; entries off the body are ignored. Missing
    /// vertex values are extrapolated from the nearest nodes.
    pub fn from_parts(
        polytope: &Arc<Polytope>,
        grid: &Arc<Grid>,
        body: ConvexBody,
        mut values: Vec<f64>,
        vertex_values: Option<Vec<f64>>,
    ) -> Result<Self, ToricError> {
        if values.len() != grid.len() {
            return Err(ToricError::Invalid(format!("expected {} node values, got {}", grid.len(), values.len())));
        }
        let tol = Self::membership_tol(grid);
        for (i, v) in values.iter_mut().enumerate() {
            if !(grid.in_polytope(i) && body.contains(&grid.node(i), tol)) {
                *v = f64::INFINITY;
            }
        }
        let vertex_values = match vertex_values {
            Some(vv) => vv,
            None => extrapolate_vertices(grid, &body, &values)?,
        };
        Self::assemble(polytope, grid, body, values, vertex_values)
    }

    /// `g ≡ 0` on `body`: the model potential with that singularity type.
    pub fn model(polytope: &Arc<Polytope>, grid: &Arc<Grid>, body: ConvexBody) -> Result<Self, ToricError> {
        Self::from_fn(polytope, grid, body, |_| 0.0)
    }

    /// `g ≡ 0` on `P`: the reference potential, whose primal is the support function of `P`.
    pub fn reference(polytope: &Arc<Polytope>, grid: &Arc<Grid>) -> Self {
        Self::model(polytope, grid, polytope.body().clone()).expect("reference is valid")
    }

    fn assemble(
        polytope: &Arc<Polytope>,
        grid: &Arc<Grid>,
        body: ConvexBody,
        values: Vec<f64>,
        vertex_values: Vec<f64>,
    ) -> Result<Self, ToricError> {
        if body.dim() != polytope.dim() {
            return Err(ToricError::Invalid("body and polytope dimensions differ".into()));
        }
        let tol = 1e-9 * (1.0 + polytope.body().bbox().1.iter().fold(0.0f64, |a, x| a.max(x.abs())));
        if body.vertices().iter().any(|v| !polytope.contains(v, tol)) {
            return Err(ToricError::Invalid("body is not contained in the polytope".into()));
        }
        if vertex_values.len() != body.vertices().len() {
            return Err(ToricError::Invalid("one value per body vertex is required".into()));
        }
        if vertex_values.iter().any(|v| !v.is_finite()) {
            return Err(ToricError::Invalid("dual potential must be finite on its body".into()));
        }
        let mut knots = Vec::new();
        if polytope.dim() == 1 {
            let (lo, hi) = match body {
                ConvexBody::Interval { lo, hi } => (lo, hi),
                _ => unreachable!(),
            };
            let eps = 1e-9 * grid.resolution();
            knots.push((lo, vertex_values[0]));
            for (i, &v) in values.iter().enumerate() {
                let p = grid.node(i)[0];
                if v.is_finite() && p > lo + eps && p < hi - eps {
                    knots.push((p, v));
                }
            }
            if hi > lo {
                knots.push((hi, *vertex_values.last().unwrap()));
            }
        }
        let u = DualPotential { polytope: polytope.clone(), grid: grid.clone(), body, values, vertex_values, knots };
        u.check_convex()?;
        Ok(u)
    }

    fn check_convex(&self) -> Result<(), ToricError> {
        let scale = 1.0 + self.finite_values().fold(0.0f64, |a, v| a.max(v.abs()));
        let tol = CONVEXITY_TOL * scale;
        if self.dim() == 1 {
            for w in self.knots.windows(3) {
                let (a, b, c) = (w[0], w[1], w[2]);
                let interp = a.1 + (c.1 - a.1) * (b.0 - a.0) / (c.0 - a.0);
                if b.1 > interp + tol {
                    return Err(ToricError::NotConvex(format!("g fails convexity at p = {}", b.0)));
                }
            }
        } else {
            for (a, b, c) in self.grid.triples() {
                let (ga, gb, gc) = (self.values[a], self.values[b], self.values[c]);
                if ga.is_finite() && gb.is_finite() && gc.is_finite() && ga + gc - 2.0 * gb < -tol {
                    return Err(ToricError::NotConvex(format!("g fails convexity at {:?}", self.grid.node(b))));
                }
            }
        }
        Ok(())
    }

    fn finite_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().copied().filter(|v| v.is_finite()).chain(self.vertex_values.iter().copied())
    }

    pub fn dim(&self) -> usize {
        self.polytope.dim()
    }

    pub fn polytope(&self) -> &Arc<Polytope> {
        &self.polytope
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn body(&self) -> &ConvexBody {
        &self.body
    }

    /// Node values, `+∞` off the body.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vertex_values(&self) -> &[f64] {
        &self.vertex_values
    }

    /// Dimension one: sorted breakpoints `(p, g(p))` of the interpolant.
    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    /// All stored finite samples `(p, g(p))`: nodes in the body and body vertices.
    pub fn finite_points(&self) -> Vec<(Vec<f64>, f64)> {
        let mut out: Vec<(Vec<f64>, f64)> = self
            .values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_finite())
            .map(|(i, v)| (self.grid.node(i), *v))
            .collect();
        out.extend(self.body.vertices().into_iter().zip(self.vertex_values.iter().copied()));
        out
    }

    /// `g(p)`, `+∞` off the body.
    pub fn eval(&self, p: &[f64]) -> f64 {
        let tol = Self::membership_tol(&self.grid);
        if self.body.excess(p) > tol {
            return f64::INFINITY;
        }
        if self.dim() == 1 {
            return interp_knots(&self.knots, p[0]);
        }
        let g = &self.grid;
        let (cell, f) = g.locate(p);
        let (i, j) = (cell[0], cell[1]);
        let (a, b, c, d) = (g.index(i, j), g.index(i + 1, j), g.index(i + 1, j + 1), g.index(i, j + 1));
        let v = &self.values;
        let value = if f[0] >= f[1] {
            (1.0 - f[0]) * v[a] + (f[0] - f[1]) * v[b] + f[1] * v[c]
        } else {
            (1.0 - f[1]) * v[a] + f[0] * v[c] + (f[1] - f[0]) * v[d]
        };
        if value.is_finite() {
            return value;
        }
        // Near the boundary of the body: nearest stored sample.
        let mut best = (f64::INFINITY, 0.0);
        for idx in [a, b, c, d] {
            if v[idx].is_finite() {
                let dist = sq_dist(&g.node(idx), p);
                if dist < best.0 {
                    best = (dist, v[idx]);
                }
            }
        }
        for (q, &gv) in self.body.vertices().iter().zip(&self.vertex_values) {
            let dist = sq_dist(q, p);
            if dist < best.0 {
                best = (dist, gv);
            }
        }
        best.1
    }

    /// `min_Q g`; the primal potential has `sup u = −min g` relative to the reference.
    pub fn min_value(&self) -> f64 {
        self.finite_values().fold(f64::INFINITY, f64::min)
    }

    /// `u(x) = sup_{p ∈ Q} (⟨p, x⟩ − g(p))` over the stored samples.
    pub fn primal_eval(&self, x: &[f64]) -> f64 {
        if self.dim() == 1 {
            return self.knots.iter().map(|(p, g)| p * x[0] - g).fold(f64::NEG_INFINITY, f64::max);
        }
        self.finite_points()
            .iter()
            .map(|(p, g)| p[0] * x[0] + p[1] * x[1] - g)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Exact piecewise-linear primal in dimension one.
    pub fn primal_pl(&self) -> PrimalPl {
        assert_eq!(self.dim(), 1, "primal_pl is one-dimensional");
        PrimalPl::from_knots(&self.knots)
    }

    /// `n! · vol(Q)`.
    pub fn mass(&self) -> f64 {
        factorial(self.dim()) * self.body.volume()
    }

    pub fn is_zero_mass(&self) -> bool {
        self.body.volume() <= 1e-14 * self.polytope.volume()
    }

    pub fn is_full_mass(&self) -> bool {
        self.body.volume() >= self.polytope.volume() * (1.0 - 1e-12)
    }

    /// Monge–Ampère energy `I(u) = −(1/vol P) ∫_P g`; `−∞` unless `Q = P`.
    pub fn energy_i(&self) -> f64 {
        if !self.is_full_mass() {
            return f64::NEG_INFINITY;
        }
        -self.integral() / self.polytope.volume()
    }

    /// `∫_Q g` of the piecewise-linear interpolant.
    fn integral(&self) -> f64 {
        if self.dim() == 1 {
            return self.knots.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum();
        }
        let g = &self.grid;
        let cell_area = 0.5 * g.step()[0] * g.step()[1];
        let tol = Self::membership_tol(g);
        let mut total = 0.0;
        for tri in g.triangles() {
            let vals = tri.map(|i| self.values[i]);
            if vals.iter().all(|v| v.is_finite()) {
                total += cell_area * (vals[0] + vals[1] + vals[2]) / 3.0;
                continue;
            }
            let pts: Vec<[f64; 2]> = tri.iter().map(|&i| {
                let n = g.node(i);
                [n[0], n[1]]
            }).collect();
            if tri.iter().all(|&i| self.body.excess(&g.node(i)) > tol) && !touches(&self.body, &pts) {
                continue;
            }
            let piece = ConvexBody::Polygon(pts).intersect(&self.body);
            if let Some(ConvexBody::Polygon(v)) = piece {
                for k in 1..v.len().saturating_sub(1) {
                    let (a, b, c) = (v[0], v[k], v[k + 1]);
                    let area = 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])).abs();
                    total += area * (self.eval(&a) + self.eval(&b) + self.eval(&c)) / 3.0;
                }
            }
        }
        total
    }

    /// Dual of `u + c`: `g − c`.
    pub fn shifted(&self, c: f64) -> DualPotential {
        let mut out = self.clone();
        for v in out.values.iter_mut().chain(out.vertex_values.iter_mut()) {
            *v -= c;
        }
        for k in out.knots.iter_mut() {
            k.1 -= c;
        }
        out
    }

    /// Dual of `s · u` for `s > 0`: `s · g` on the same body.
    pub fn scaled(&self, s: f64) -> DualPotential {
        assert!(s > 0.0, "scale must be positive");
        let mut out = self.clone();
        for v in out.values.iter_mut().chain(out.vertex_values.iter_mut()) {
            if v.is_finite() {
                *v *= s;
            }
        }
        for k in out.knots.iter_mut() {
            k.1 *= s;
        }
        out
    }

    /// `max_Q g`.
    pub fn max_value(&self) -> f64 {
        self.finite_values().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Same body, `g ↦ 0`: the model envelope `P[u]`.
    pub fn model_envelope(&self) -> DualPotential {
        Self::model(&self.polytope, &self.grid, self.body.clone()).expect("model potential is valid")
    }

    /// `P_I[u]`; coincides with [`Self::model_envelope`] for torus-invariant potentials.
    pub fn i_envelope(&self) -> DualPotential {
        self.model_envelope()
    }

    pub fn same_space(&self, other: &DualPotential) -> bool {
        (Arc::ptr_eq(&self.grid, &other.grid) || self.grid == other.grid) && self.polytope == other.polytope
    }

    fn require_same_space(&self, other: &DualPotential) -> Result<(), ToricError> {
        if self.same_space(other) {
            Ok(())
        } else {
            Err(ToricError::Mismatch)
        }
    }

    /// Rooftop envelope `P(u, v)`: pointwise max of duals on `Q_u ∩ Q_v`.
    pub fn rooftop(&self, other: &DualPotential) -> Result<DualPotential, ToricError> {
        self.require_same_space(other)?;
        let body = self.body.intersect(&other.body).ok_or(ToricError::EmptyRooftop)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a.max(*b)).collect();
        let vertex_values = body.vertices().iter().map(|v| self.eval(v).max(other.eval(v))).collect::<Vec<_>>();
        if vertex_values.iter().any(|v: &f64| !v.is_finite()) {
            return Err(ToricError::EmptyRooftop);
        }
        DualPotential::from_parts(&self.polytope, &self.grid, body, values, Some(vertex_values))
    }

    /// `d1(u, v) = I(u) + I(v) − 2 I(P(u, v))` for full-mass inputs.
    pub fn d1_distance(&self, other: &DualPotential) -> Result<f64, ToricError> {
        self.require_same_space(other)?;
        if !self.is_full_mass() || !other.is_full_mass() {
            return Err(ToricError::FiniteEnergy("d1 needs full-mass potentials".into()));
        }
        let roof = self.rooftop(other)?;
        Ok((self.energy_i() + other.energy_i() - 2.0 * roof.energy_i()).max(0.0))
    }

    /// Pointwise `g ≤ other.g` on the grid, i.e. `u ≥ v` for the primal potentials.
    pub fn dominates(&self, other: &DualPotential, tol: f64) -> bool {
        self.values.iter().zip(&other.values).all(|(a, b)| *a <= *b + tol || (a.is_infinite() && b.is_infinite()))
    }
}

fn touches(body: &ConvexBody, tri: &[[f64; 2]]) -> bool {
    let t = ConvexBody::Polygon(tri.to_vec());
    body.vertices().iter().any(|v| t.contains(v, 0.0))
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn interp_knots(knots: &[(f64, f64)], x: f64) -> f64 {
    if knots.len() == 1 {
        return knots[0].1;
    }
    let i = knots.partition_point(|k| k.0 < x).clamp(1, knots.len() - 1);
    let (a, b) = (knots[i - 1], knots[i]);
    a.1 + (b.1 - a.1) * (x - a.0) / (b.0 - a.0)
}

fn extrapolate_vertices(grid: &Grid, body: &ConvexBody, values: &[f64]) -> Result<Vec<f64>, ToricError> {
    let finite: Vec<(Vec<f64>, f64)> =
        (0..grid.len()).filter(|&i| values[i].is_finite()).map(|i| (grid.node(i), values[i])).collect();
    if finite.is_empty() {
        return Err(ToricError::Invalid("body holds no grid node; vertex values are required".into()));
    }
    let out = body
        .vertices()
        .iter()
        .map(|v| {
            if grid.dim() == 1 {
                let mut pts: Vec<&(Vec<f64>, f64)> = finite.iter().collect();
                pts.sort_by(|a, b| (a.0[0] - v[0]).abs().total_cmp(&(b.0[0] - v[0]).abs()));
                if pts.len() >= 2 && (pts[0].0[0] - pts[1].0[0]).abs() > 0.0 {
                    let (a, b) = (pts[0], pts[1]);
                    return a.1 + (b.1 - a.1) * (v[0] - a.0[0]) / (b.0[0] - a.0[0]);
                }
                pts[0].1
            } else {
                finite
                    .iter()
                    .min_by(|a, b| sq_dist(&a.0, v).total_cmp(&sq_dist(&b.0, v)))
                    .map(|x| x.1)
                    .unwrap()
            }
        })
        .collect();
    Ok(out)
}

/// The primal of a one-dimensional dual, `u(x) = max_j (p_j x − g_j)`.
///
/// Only the lower convex hull of the knots contributes; `breaks[j]` is the
/// `x` where piece `j` hands over to piece `j + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimalPl {
    slopes: Vec<f64>,
    offsets: Vec<f64>,
    breaks: Vec<f64>,
}

impl PrimalPl {
    pub fn from_knots(knots: &[(f64, f64)]) -> PrimalPl {
        let mut hull: Vec<(f64, f64)> = Vec::new();
        for &k in knots {
            while hull.len() >= 2 {
                let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
                // Drop b if it lies on or above the chord a–k.
                if (b.1 - a.1) * (k.0 - a.0) >= (k.1 - a.1) * (b.0 - a.0) {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(k);
        }
        let breaks = hull.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect();
        PrimalPl { slopes: hull.iter().map(|h| h.0).collect(), offsets: hull.iter().map(|h| -h.1).collect(), breaks }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let j = self.breaks.partition_point(|b| *b < x);
        self.slopes[j] * x + self.offsets[j]
    }

    /// Slope of the piece active at `x` (right derivative at breakpoints).
    pub fn slope_at(&self, x: f64) -> f64 {
        self.slopes[self.breaks.partition_point(|b| *b <= x)]
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }

    /// Gradient image endpoints `(q0, q1)`.
    pub fn slope_range(&self) -> (f64, f64) {
        (self.slopes[0], *self.slopes.last().unwrap())
    }

    /// Value of the dual at the extreme slopes: `u(x) = q x − g(q)` far out.
    pub fn end_offsets(&self) -> (f64, f64) {
        (self.offsets[0], *self.offsets.last().unwrap())
    }
}

/// Discrete Legendre transform of samples `f(x_j)` on an increasing `x`-grid.
///
/// The body is the slope range of the samples intersected with `P`.
pub fn legendre_dual_1d(
    polytope: &Arc<Polytope>,
    grid: &Arc<Grid>,
    xs: &[f64],
    fs: &[f64],
) -> Result<DualPotential, ToricError> {
    if xs.len() != fs.len() || xs.len() < 3 {
        return Err(ToricError::Invalid("need at least three matching x and f samples".into()));
    }
    if xs.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(ToricError::Invalid("x-grid must increase strictly".into()));
    }
    let slopes: Vec<f64> = xs.windows(2).zip(fs.windows(2)).map(|(x, f)| (f[1] - f[0]) / (x[1] - x[0])).collect();
    let scale = 1.0 + slopes.iter().fold(0.0f64, |a, s| a.max(s.abs()));
    for (i, w) in slopes.windows(2).enumerate() {
        if w[1] < w[0] - 1e-9 * scale {
            return Err(ToricError::NotConvex(format!("samples fail convexity near x = {}", xs[i + 1])));
        }
    }
    let range = ConvexBody::interval(slopes[0], *slopes.last().unwrap());
    let body = range
        .intersect(polytope.body())
        .ok_or_else(|| ToricError::Invalid("gradient image misses the polytope".into()))?;
    let conj = |p: &[f64]| xs.iter().zip(fs).map(|(x, f)| p[0] * x - f).fold(f64::NEG_INFINITY, f64::max);
    DualPotential::from_fn(polytope, grid, body, conj)
}

/// Regular planar sample grid `x = (x0 + i dx, y0 + j dy)`, row-major in `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid2 {
    pub origin: [f64; 2],
    pub step: [f64; 2],
    pub counts: [usize; 2],
}

impl SampleGrid2 {
    pub fn point(&self, i: usize, j: usize) -> [f64; 2] {
        [self.origin[0] + i as f64 * self.step[0], self.origin[1] + j as f64 * self.step[1]]
    }
}

/// Discrete Legendre transform of planar samples, `fs[i + j * nx]`.
pub fn legendre_dual_2d(
    polytope: &Arc<Polytope>,
    grid: &Arc<Grid>,
    xg: &SampleGrid2,
    fs: &[f64],
) -> Result<DualPotential, ToricError> {
    let [nx, ny] = xg.counts;
    if nx < 2 || ny < 2 || fs.len() != nx * ny {
        return Err(ToricError::Invalid("sample grid needs at least 2x2 matching samples".into()));
    }
    let at = |i: usize, j: usize| fs[i + j * nx];
    let scale = 1.0 + fs.iter().fold(0.0f64, |a, f| a.max(f.abs()));
    for j in 0..ny {
        for i in 0..nx {
            let c = at(i, j);
            if i >= 1 && i + 1 < nx && at(i - 1, j) + at(i + 1, j) - 2.0 * c < -1e-9 * scale {
                return Err(ToricError::NotConvex(format!("samples fail convexity at {:?}", xg.point(i, j))));
            }
            if j >= 1 && j + 1 < ny && at(i, j - 1) + at(i, j + 1) - 2.0 * c < -1e-9 * scale {
                return Err(ToricError::NotConvex(format!("samples fail convexity at {:?}", xg.point(i, j))));
            }
        }
    }
    let mut grads = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let (a, b, c, d) = (at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1));
            grads.push(vec![(b - a) / xg.step[0], (c - b) / xg.step[1]]);
            grads.push(vec![(c - d) / xg.step[0], (d - a) / xg.step[1]]);
        }
    }
    let body = ConvexBody::hull(2, &grads)
        .and_then(|h| h.intersect(polytope.body()))
        .ok_or_else(|| ToricError::Invalid("gradient image misses the polytope".into()))?;
    // Separable sup: g(p) = max_i [p1 x_i + max_j (p2 y_j − f_ij)].
    let conj = |p: &[f64]| {
        let mut best = f64::NEG_INFINITY;
        for i in 0..nx {
            let x = xg.origin[0] + i as f64 * xg.step[0];
            let mut inner = f64::NEG_INFINITY;
            for j in 0..ny {
                let y = xg.origin[1] + j as f64 * xg.step[1];
                inner = inner.max(p[1] * y - at(i, j));
            }
            best = best.max(p[0] * x + inner);
        }
        best
    };
    DualPotential::from_fn(polytope, grid, body, conj)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> (Arc<Polytope>, Arc<Grid>) {
        let p = Arc::new(Polytope::unit_interval());
        let g = Arc::new(Grid::default_for(&p));
        (p, g)
    }

    #[test]
    fn support_function_primal() {
        let (p, g) = unit();
        let r = DualPotential::reference(&p, &g);
        assert_eq!(r.primal_eval(&[2.0]), 2.0);
        assert_eq!(r.primal_eval(&[-3.0]), 0.0);
        let c = r.shifted(-0.5);
        assert_eq!(c.primal_eval(&[2.0]), 1.5);
    }

    #[test]
    fn masses() {
        let (p, g) = unit();
        assert_eq!(DualPotential::reference(&p, &g).mass(), 1.0);
        let half = DualPotential::model(&p, &g, ConvexBody::interval(0.0, 0.5)).unwrap();
        assert_eq!(half.mass(), 0.5);
        let point = DualPotential::model(&p, &g, ConvexBody::interval(0.3, 0.3)).unwrap();
        assert!(point.is_zero_mass());
    }

    #[test]
    fn triangle_mass_is_one() {
        let p = Arc::new(Polytope::unit_square());
        let g = Arc::new(Grid::new(&p, 1.0 / 16.0));
        let tri = ConvexBody::hull(2, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!((DualPotential::model(&p, &g, tri).unwrap().mass() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn energy_examples() {
        let (p, g) = unit();
        let r = DualPotential::reference(&p, &g);
        assert_eq!(r.energy_i(), 0.0);
        let lin = DualPotential::from_fn(&p, &g, p.body().clone(), |x| x[0]).unwrap();
        assert!((lin.energy_i() + 0.5).abs() < 1e-14);
        assert!((lin.shifted(0.75).energy_i() - 0.25).abs() < 1e-14);
        let half = DualPotential::model(&p, &g, ConvexBody::interval(0.0, 0.5)).unwrap();
        assert_eq!(half.energy_i(), f64::NEG_INFINITY);
    }

    #[test]
    fn energy_2d_quadratic() {
        let p = Arc::new(Polytope::unit_square());
        let g = Arc::new(Grid::new(&p, 1.0 / 64.0));
        let u = DualPotential::from_fn(&p, &g, p.body().clone(), |x| x[0] * x[0] + x[1]).unwrap();
        // −(1/3 + 1/2), up to the O(h²) interpolation error.
        assert!((u.energy_i() + 5.0 / 6.0).abs() < 1e-4);
    }

    #[test]
    fn rooftop_examples() {
        let (p, g) = unit();
        let r = DualPotential::reference(&p, &g);
        let one = r.shifted(-1.0);
        assert_eq!(r.rooftop(&one).unwrap(), one);
        assert_eq!(r.rooftop(&r).unwrap(), r);
        let a = DualPotential::model(&p, &g, ConvexBody::interval(0.0, 0.25)).unwrap();
        let b = DualPotential::model(&p, &g, ConvexBody::interval(0.5, 1.0)).unwrap();
        assert!(matches!(a.rooftop(&b), Err(ToricError::EmptyRooftop)));
    }

    #[test]
    fn d1_constants() {
        let (p, g) = unit();
        let r = DualPotential::reference(&p, &g);
        assert_eq!(r.d1_distance(&r).unwrap(), 0.0);
        assert!((r.d1_distance(&r.shifted(-1.0)).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn model_envelope_examples() {
        let (p, g) = unit();
        let lin = DualPotential::from_fn(&p, &g, p.body().clone(), |x| x[0]).unwrap();
        let m = lin.model_envelope();
        assert_eq!(m, DualPotential::reference(&p, &g));
        assert_eq!(m.model_envelope(), m);
        assert_eq!(lin.i_envelope(), m);
    }

    #[test]
    fn legendre_of_hinge() {
        let (p, g) = unit();
        let xs: Vec<f64> = (0..=400).map(|i| -2.0 + i as f64 * 0.01).collect();
        let fs: Vec<f64> = xs.iter().map(|x| (x - 1.0).max(0.0)).collect();
        let u = legendre_dual_1d(&p, &g, &xs, &fs).unwrap();
        assert_eq!(u.body(), &ConvexBody::interval(0.0, 1.0));
        for (q, v) in u.finite_points() {
            assert!((v - q[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn legendre_rejects_concave() {
        let (p, g) = unit();
        let xs = [0.0, 1.0, 2.0];
        let fs = [0.0, 1.0, 1.5];
        assert!(matches!(legendre_dual_1d(&p, &g, &xs, &fs), Err(ToricError::NotConvex(_))));
    }

    #[test]
    fn primal_pl_matches_brute_force() {
        let (p, g) = unit();
        let u = DualPotential::from_fn(&p, &g, ConvexBody::interval(0.125, 0.75), |x| (x[0] - 0.4).powi(2)).unwrap();
        let pl = u.primal_pl();
        for i in 0..200 {
            let x = -3.0 + i as f64 * 0.03;
            assert!((pl.eval(x) - u.primal_eval(&[x])).abs() < 1e-13);
        }
        assert_eq!(pl.slope_range(), (0.125, 0.75));
    }

    #[test]
    fn rejects_nonconvex() {
        let (p, g) = unit();
        let r = DualPotential::from_fn(&p, &g, p.body().clone(), |x| -(x[0] * x[0]));
        assert!(matches!(r, Err(ToricError::NotConvex(_))));
    }
}
