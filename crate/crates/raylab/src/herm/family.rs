use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::metric::{relative_eigen, CMat, CVec, HermitianMetric};
use super::HermError;
use crate::diag::{Estimate, Warning};
use crate::stats::{ls_slope, second_differences};

/// A geodesic ray `H_s = A diag(e^{sλ_j}) A*` through `H_0 = A A*`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicRay {
    factor: CMat,
    exponents: Vec<f64>,
}

impl GeodesicRay {
    pub fn new(factor: CMat, exponents: Vec<f64>) -> Result<Self, HermError> {
        if factor.nrows() != factor.ncols() || factor.ncols() != exponents.len() || exponents.is_empty() {
            return Err(HermError::Shape("ray factor must be square and match the exponents".into()));
        }
        if exponents.iter().any(|l| !l.is_finite()) {
            return Err(HermError::Unbounded("ray exponents must be finite".into()));
        }
        // Invertibility of the factor is checked through H_0.
        HermitianMetric::congruence(&factor, &vec![1.0; exponents.len()])?;
        Ok(GeodesicRay { factor, exponents })
    }

    /// Diagonal ray `diag(e^{sλ_j})` in the standard basis.
    pub fn diagonal(exponents: &[f64]) -> Self {
        let n = exponents.len();
        GeodesicRay { factor: CMat::identity(n, n), exponents: exponents.to_vec() }
    }

    pub fn factor(&self) -> &CMat {
        &self.factor
    }

    pub fn exponents(&self) -> &[f64] {
        &self.exponents
    }

    pub fn at(&self, s: f64) -> HermitianMetric {
        let d: Vec<f64> = self.exponents.iter().map(|l| (s * l).exp()).collect();
        HermitianMetric::congruence(&self.factor, &d).expect("ray stays definite")
    }

    /// Exact exponent: the largest `λ_j` whose coordinate `(A* v)_j` is nonzero.
    pub fn exponent(&self, v: &CVec) -> f64 {
        let c = self.factor.adjoint() * v;
        let scale = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return f64::NEG_INFINITY;
        }
        c.iter()
            .zip(&self.exponents)
            .filter(|(z, _)| z.norm() > 1e-10 * scale)
            .map(|(_, &l)| l)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Samples `(s_i, H_{s_i})` with `s_0 = 0` and a tail window for slopes.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFamily {
    samples: Vec<(f64, HermitianMetric)>,
    tail: (f64, f64),
}

impl SampledFamily {
    /// `tail = None` uses `[s_max/2, s_max]`.
    pub fn new(samples: Vec<(f64, HermitianMetric)>, tail: Option<(f64, f64)>) -> Result<Self, HermError> {
        let Some(first) = samples.first() else {
            return Err(HermError::Data("family has no samples".into()));
        };
        if first.0 != 0.0 {
            return Err(HermError::Data("first sample must sit at s = 0".into()));
        }
        let n = first.1.dim();
        for w in samples.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(HermError::Data("sample parameters must increase strictly".into()));
            }
        }
        if samples.iter().any(|(_, h)| h.dim() != n) {
            return Err(HermError::Shape("samples have mixed dimensions".into()));
        }
        let smax = samples.last().unwrap().0;
        let tail = tail.unwrap_or((smax / 2.0, smax));
        if !(tail.0 < tail.1) {
            return Err(HermError::Data(format!("empty tail window {tail:?}")));
        }
        Ok(SampledFamily { samples, tail })
    }

    /// Sample `f` on `s = 0, step, 2 step, …, s_max`.
    pub fn from_fn(
        s_max: f64,
        step: f64,
        mut f: impl FnMut(f64) -> Result<HermitianMetric, HermError>,
    ) -> Result<Self, HermError> {
        let count = (s_max / step).round() as usize;
        let samples = (0..=count)
            .map(|i| {
                let s = i as f64 * step;
                f(s).map(|h| (s, h))
            })
            .collect::<Result<Vec<_>, _>>()?;
        SampledFamily::new(samples, None)
    }

    pub fn samples(&self) -> &[(f64, HermitianMetric)] {
        &self.samples
    }

    pub fn tail_window(&self) -> (f64, f64) {
        self.tail
    }

    fn tail_samples(&self) -> Result<Vec<&(f64, HermitianMetric)>, HermError> {
        let (a, b) = self.tail;
        let t: Vec<_> = self.samples.iter().filter(|(s, _)| *s >= a && *s <= b).collect();
        if t.len() < 2 {
            return Err(HermError::Data(format!(
                "tail window [{a}, {b}] holds {} samples, need at least 2",
                t.len()
            )));
        }
        Ok(t)
    }

    /// Restrict to samples with `s ≤ horizon`, tail window `[horizon/2, horizon]`.
    fn truncated(&self, horizon: f64) -> Result<SampledFamily, HermError> {
        let samples: Vec<_> = self.samples.iter().filter(|(s, _)| *s <= horizon + 1e-12).cloned().collect();
        SampledFamily::new(samples, Some((horizon / 2.0, horizon)))
    }
}

/// A one-parameter family `s ↦ H_s`.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricFamily {
    Sampled(SampledFamily),
    Generator(GeodesicRay),
}

impl MetricFamily {
    pub fn dim(&self) -> usize {
        match self {
            MetricFamily::Sampled(f) => f.samples[0].1.dim(),
            MetricFamily::Generator(r) => r.exponents.len(),
        }
    }

    /// `H_0`.
    pub fn origin(&self) -> HermitianMetric {
        match self {
            MetricFamily::Sampled(f) => f.samples[0].1.clone(),
            MetricFamily::Generator(r) => r.at(0.0),
        }
    }
}

/// Increasing filtration `{v : λ_H(v) ≤ λ}` with jumps and flag dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFiltration {
    jumps: Vec<f64>,
    dims: Vec<usize>,
    /// Optional basis adapted to the flag: the first `dims[j]` columns span
    /// the `j`-th step.
    pub basis: Option<CMat>,
}

impl WeightFiltration {
    pub fn new(jumps: Vec<f64>, dims: Vec<usize>) -> Result<Self, HermError> {
        if jumps.len() != dims.len() || jumps.is_empty() {
            return Err(HermError::Data("jumps and dims must be nonempty and of equal length".into()));
        }
        if jumps.windows(2).any(|w| !(w[0] < w[1])) || jumps.iter().any(|l| !l.is_finite()) {
            return Err(HermError::Data("jumps must be finite and strictly increasing".into()));
        }
        if dims[0] == 0 || dims.windows(2).any(|w| w[0] >= w[1]) {
            return Err(HermError::Data("dims must be positive and strictly increasing".into()));
        }
        Ok(WeightFiltration { jumps, dims, basis: None })
    }

    /// Group sorted exponents whose neighbours differ by at most `tol`.
    pub fn from_exponents(sorted: &[f64], tol: f64) -> Result<Self, HermError> {
        let mut jumps = Vec::new();
        let mut dims = Vec::new();
        let mut start = 0;
        for i in 1..=sorted.len() {
            if i == sorted.len() || sorted[i] - sorted[i - 1] > tol {
                let group = &sorted[start..i];
                jumps.push(group.iter().sum::<f64>() / group.len() as f64);
                dims.push(i);
                start = i;
            }
        }
        WeightFiltration::new(jumps, dims)
    }

    pub fn jumps(&self) -> &[f64] {
        &self.jumps
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn ambient_dim(&self) -> usize {
        *self.dims.last().unwrap()
    }
}

/// `Σ_j λ_j (d_j − d_{j−1})` with `d_0 = 0`.
pub fn stieltjes_integral(w: &WeightFiltration) -> f64 {
    let mut prev = 0;
    let mut acc = 0.0;
    for (&l, &d) in w.jumps.iter().zip(&w.dims) {
        acc += l * (d - prev) as f64;
        prev = d;
    }
    acc
}

/// Tuning for the sampled-family estimators.
#[derive(Debug, Clone, Copy)]
pub struct FamilyOptions {
    /// Exponents closer than `cluster_tol · max(1, max|λ|)` form one jump.
    pub cluster_tol: f64,
    /// Allowed negative second difference in the positivity spot check.
    pub convexity_tol: f64,
    /// Number of random dual vectors probed for positivity.
    pub probes: usize,
    pub seed: u64,
}

impl Default for FamilyOptions {
    fn default() -> Self {
        FamilyOptions { cluster_tol: 1e-6, convexity_tol: 1e-8, probes: 8, seed: 0 }
    }
}

/// `λ_H(v)`: exact for rays, least-squares tail slope of `log H_s(v,v)` otherwise.
pub fn exponent(f: &MetricFamily, v: &CVec) -> Result<f64, HermError> {
    if v.len() != f.dim() {
        return Err(HermError::Shape("vector length differs from the family dimension".into()));
    }
    if v.iter().all(|z| z.norm() == 0.0) {
        return Ok(f64::NEG_INFINITY);
    }
    match f {
        MetricFamily::Generator(r) => Ok(r.exponent(v)),
        MetricFamily::Sampled(fam) => {
            let tail = fam.tail_samples()?;
            let xs: Vec<f64> = tail.iter().map(|(s, _)| *s).collect();
            let ys: Vec<f64> = tail.iter().map(|(_, h)| h.quad_form(v).ln()).collect();
            Ok(tail_slope(&xs, &ys)?)
        }
    }
}

/// Least-squares slope of `(s, y)` samples, usable for any log-sampled family.
pub fn tail_slope(xs: &[f64], ys: &[f64]) -> Result<f64, HermError> {
    ls_slope(xs, ys).ok_or_else(|| HermError::Data("tail window needs two distinct samples".into()))
}

/// Sorted exponent estimates of a sampled family, with the `H_0`-orthonormal
/// eigenbasis at the end of the tail window.
fn sampled_exponents(fam: &SampledFamily) -> Result<(Vec<f64>, CMat), HermError> {
    let h0 = &fam.samples[0].1;
    let tail = fam.tail_samples()?;
    let n = h0.dim();
    let xs: Vec<f64> = tail.iter().map(|(s, _)| *s).collect();
    let mut rows: Vec<Vec<f64>> = vec![Vec::with_capacity(tail.len()); n];
    let mut last_basis = None;
    for (_, h) in &tail {
        let r = relative_eigen(h0, h)?;
        for (j, l) in r.log_eigs.iter().enumerate() {
            rows[j].push(*l);
        }
        last_basis = Some(r.basis);
    }
    let mut slopes = Vec::with_capacity(n);
    for ys in &rows {
        let full = tail_slope(&xs, ys)?;
        if !full.is_finite() {
            return Err(HermError::Unbounded("non-finite exponent estimate".into()));
        }
        // Superlinear growth shows up as a much steeper second half.
        let mid = xs.len() / 2;
        if mid >= 2 && xs.len() - mid >= 2 {
            let a = ls_slope(&xs[..mid], &ys[..mid]).unwrap_or(full);
            let b = ls_slope(&xs[mid..], &ys[mid..]).unwrap_or(full);
            if b - a > 0.25 * a.abs().max(1.0) {
                return Err(HermError::Unbounded(format!(
                    "log-eigenvalue slope keeps growing across the tail ({a:.4} -> {b:.4})"
                )));
            }
        }
        slopes.push(full);
    }
    // Sorted log-eigenvalues have sorted slopes asymptotically; enforce it so
    // the flag basis stays aligned with the jumps.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| slopes[a].total_cmp(&slopes[b]));
    let basis_src = last_basis.unwrap();
    let mut basis = CMat::zeros(n, n);
    let mut sorted = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        basis.set_column(dst, &basis_src.column(src));
        sorted.push(slopes[src]);
    }
    Ok((sorted, basis))
}

/// Jumping numbers and flag dimensions of the family.
pub fn filtration_of(f: &MetricFamily, opts: &FamilyOptions) -> Result<WeightFiltration, HermError> {
    let (exps, basis) = match f {
        MetricFamily::Generator(r) => {
            let mut order: Vec<usize> = (0..r.exponents.len()).collect();
            order.sort_by(|&a, &b| r.exponents[a].total_cmp(&r.exponents[b]));
            // Columns of A⁻* are dual to the coordinates read by the exponent.
            let inv_adj = r
                .factor
                .clone()
                .try_inverse()
                .ok_or_else(|| HermError::Shape("singular ray factor".into()))?
                .adjoint();
            let n = order.len();
            let mut basis = CMat::zeros(n, n);
            for (dst, &src) in order.iter().enumerate() {
                basis.set_column(dst, &inv_adj.column(src));
            }
            (order.iter().map(|&i| r.exponents[i]).collect::<Vec<_>>(), basis)
        }
        MetricFamily::Sampled(fam) => sampled_exponents(fam)?,
    };
    let scale = exps.iter().fold(1.0f64, |a, l| a.max(l.abs()));
    let mut w = WeightFiltration::from_exponents(&exps, opts.cluster_tol * scale)?;
    w.basis = Some(basis);
    Ok(w)
}

/// Spot check that `s ↦ log H*_s(w,w)` is convex for random dual vectors `w`.
///
/// Returns the most negative scaled second difference found (0 when none).
pub fn positivity_defect(fam: &SampledFamily, opts: &FamilyOptions) -> f64 {
    let n = fam.samples[0].1.dim();
    let xs: Vec<f64> = fam.samples.iter().map(|(s, _)| *s).collect();
    let duals: Vec<HermitianMetric> = fam.samples.iter().map(|(_, h)| super::dualize(h)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut worst = 0.0f64;
    for _ in 0..opts.probes {
        let w = CVec::from_fn(n, |_, _| num_complex::Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let ys: Vec<f64> = duals.iter().map(|d| d.quad_form(&w).ln()).collect();
        let scale = ys.iter().fold(1.0f64, |a, y| a.max(y.abs()));
        for d in second_differences(&xs, &ys) {
            worst = worst.min(d / scale);
        }
    }
    worst
}

/// Slope of `s ↦ log det H_s`, with a positivity spot check.
pub fn det_slope(f: &MetricFamily, opts: &FamilyOptions) -> Result<Estimate, HermError> {
    match f {
        MetricFamily::Generator(r) => Ok(Estimate::clean(r.exponents.iter().sum())),
        MetricFamily::Sampled(fam) => {
            let tail = fam.tail_samples()?;
            let xs: Vec<f64> = tail.iter().map(|(s, _)| *s).collect();
            let ys: Vec<f64> = tail.iter().map(|(_, h)| h.log_det()).collect();
            let mut est = Estimate::clean(tail_slope(&xs, &ys)?);
            let defect = positivity_defect(fam, opts);
            if defect < -opts.convexity_tol {
                est.warnings.push(Warning::Positivity(format!(
                    "log H*_s(w,w) has second difference {defect:.3e} < 0"
                )));
            }
            Ok(est)
        }
    }
}

/// Asymptotic geodesic ray of a positive family, read off at `horizon`.
///
/// The ray starts at `H_0`, uses the `H_0`-orthonormal eigenbasis of `H_horizon`
/// and tail-slope exponents over `[horizon/2, horizon]`. A convergence warning
/// is attached when halving the horizon moves the exponents by more than
/// `tol`, and a positivity warning when the ray fails to stay below the
/// family on `[0, horizon]`.
pub fn asymptotic_ray(
    f: &MetricFamily,
    horizon: f64,
    tol: f64,
    opts: &FamilyOptions,
) -> Result<(GeodesicRay, Vec<Warning>), HermError> {
    let fam = match f {
        MetricFamily::Generator(r) => return Ok((r.clone(), Vec::new())),
        MetricFamily::Sampled(fam) => fam,
    };
    let near = fam.truncated(horizon)?;
    let (exps, basis) = sampled_exponents(&near)?;
    let factor = basis
        .try_inverse()
        .ok_or_else(|| HermError::Shape("degenerate eigenbasis".into()))?
        .adjoint();
    let ray = GeodesicRay { factor, exponents: exps.clone() };
    let mut warnings = Vec::new();
    if let Ok(half) = fam.truncated(horizon / 2.0) {
        if let Ok((e2, _)) = sampled_exponents(&half) {
            let drift = exps.iter().zip(&e2).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
            if drift > tol {
                warnings.push(Warning::Convergence(format!(
                    "exponents moved by {drift:.3e} between horizons {} and {horizon}",
                    horizon / 2.0
                )));
            }
        }
    }
    let mut excess = 0.0f64;
    for (s, h) in near.samples() {
        let r = relative_eigen(h, &ray.at(*s))?;
        excess = excess.max(*r.log_eigs.last().unwrap());
    }
    if excess > tol.max(opts.convexity_tol) {
        warnings.push(Warning::Positivity(format!(
            "asymptotic ray exceeds the family by a factor e^{excess:.3e}"
        )));
    }
    Ok((ray, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn sampled(f: impl Fn(f64) -> Vec<f64>, smax: f64) -> MetricFamily {
        MetricFamily::Sampled(SampledFamily::from_fn(smax, 0.5, |s| HermitianMetric::from_diag(&f(s))).unwrap())
    }

    #[test]
    fn constant_family() {
        let f = sampled(|_| vec![2.0, 3.0], 20.0);
        let v = CVec::from_vec(vec![c(1.0), c(-2.0)]);
        assert!(exponent(&f, &v).unwrap().abs() < 1e-12);
        let w = filtration_of(&f, &FamilyOptions::default()).unwrap();
        assert_eq!(w.dims(), &[2]);
        assert!(w.jumps()[0].abs() < 1e-12);
        assert!(det_slope(&f, &FamilyOptions::default()).unwrap().value.abs() < 1e-12);
    }

    #[test]
    fn diagonal_ray_exponents() {
        let ray = MetricFamily::Generator(GeodesicRay::diagonal(&[2.0, -1.0]));
        let e1 = CVec::from_vec(vec![c(1.0), c(0.0)]);
        assert_eq!(exponent(&ray, &e1).unwrap(), 2.0);
        let w = filtration_of(&ray, &FamilyOptions::default()).unwrap();
        assert_eq!(w.jumps(), &[-1.0, 2.0]);
        assert_eq!(w.dims(), &[1, 2]);
        assert_eq!(det_slope(&ray, &FamilyOptions::default()).unwrap().value, 1.0);
        assert_eq!(exponent(&ray, &CVec::zeros(2)).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn sampled_max_rule() {
        let f = sampled(|s| vec![s.exp(), (2.0 * s).exp()], 20.0);
        let v = CVec::from_vec(vec![c(1.0), c(1.0)]);
        assert!((exponent(&f, &v).unwrap() - 2.0).abs() < 1e-4);
    }

    #[test]
    fn stieltjes_examples() {
        let w = WeightFiltration::new(vec![-1.0, 2.0], vec![1, 2]).unwrap();
        assert_eq!(stieltjes_integral(&w), 1.0);
        let single = WeightFiltration::new(vec![0.75], vec![4]).unwrap();
        assert_eq!(stieltjes_integral(&single), 3.0);
    }

    #[test]
    fn filtration_validation() {
        assert!(WeightFiltration::new(vec![1.0, 0.0], vec![1, 2]).is_err());
        assert!(WeightFiltration::new(vec![0.0, 1.0], vec![2, 2]).is_err());
        assert!(WeightFiltration::new(vec![0.0], vec![1, 2]).is_err());
    }

    #[test]
    fn insufficient_tail() {
        let fam = SampledFamily::new(
            vec![(0.0, HermitianMetric::identity(1)), (1.0, HermitianMetric::identity(1))],
            Some((0.5, 0.9)),
        )
        .unwrap();
        let v = CVec::from_vec(vec![c(1.0)]);
        assert!(matches!(exponent(&MetricFamily::Sampled(fam), &v), Err(HermError::Data(_))));
    }

    #[test]
    fn superexponential_growth_is_unbounded() {
        let f = sampled(|s| vec![(s * s / 4.0).exp(), 1.0], 8.0);
        assert!(matches!(filtration_of(&f, &FamilyOptions::default()), Err(HermError::Unbounded(_))));
    }

    #[test]
    fn asymptotic_ray_of_ray_is_itself() {
        let r = GeodesicRay::diagonal(&[1.0, 3.0]);
        let (out, w) = asymptotic_ray(&MetricFamily::Generator(r.clone()), 10.0, 1e-6, &FamilyOptions::default()).unwrap();
        assert_eq!(out, r);
        assert!(w.is_empty());
    }
}
