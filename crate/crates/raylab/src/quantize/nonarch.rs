use rayon::prelude::*;
use serde::Serialize;

use super::hilbert::{hilbert_map, lk_against, HilbertOptions};
use super::lattice::SectionSpace;
use super::QuantizeError;
use crate::diag::Warning;
use crate::herm::{exponent, CVec, HermitianMetric, MetricFamily, SampledFamily};
use crate::raycurve::{hat_curve, Ray, TestCurve};
use crate::stats::{fit_inverse_k, ls_slope, second_differences};
use crate::toric::{factorial, DualPotential};

/// Left-continuous step function `τ ↦ h⁰(ψ_τ)`: `counts[i]` holds on
/// `(jump_{i−1}, jump_i]`, `counts[0]` on `(−∞, jump_0]`, and the final
/// entry, zero, above the last jump.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountStep {
    pub k: u32,
    pub total: usize,
    pub jump_locations: Vec<f64>,
    pub counts: Vec<usize>,
}

impl CountStep {
    pub fn eval(&self, tau: f64) -> usize {
        self.counts[self.jump_locations.partition_point(|j| *j < tau)]
    }

    /// `(τ_j, count drop at τ_j)`.
    pub fn drops(&self) -> impl Iterator<Item = (f64, usize)> + '_ {
        self.jump_locations.iter().enumerate().map(|(i, t)| (*t, self.counts[i] - self.counts[i + 1]))
    }
}

/// Count step of `ψ` at level `k`. A section `α` counts at `τ` exactly when
/// `τ ≤ τ_α`, the membership threshold of `α/k`, so the jumps are the
/// distinct finite `τ_α`.
pub fn count_step(curve: &TestCurve, k: u32, twist_margin: f64) -> Result<CountStep, QuantizeError> {
    let space = SectionSpace::new(curve.polytope(), k, twist_margin)?;
    let margin = twist_margin / k as f64;
    let mut thresholds: Vec<f64> = (0..space.dim())
        .into_par_iter()
        .map(|i| curve.membership_threshold(&space.point(i), margin))
        .filter(|t| t.is_finite())
        .collect();
    thresholds.sort_by(f64::total_cmp);
    let mut jump_locations: Vec<f64> = Vec::new();
    let mut drops: Vec<usize> = Vec::new();
    for t in thresholds {
        match jump_locations.last() {
            Some(&last) if t - last <= 1e-12 * (1.0 + last.abs()) => *drops.last_mut().unwrap() += 1,
            _ => {
                jump_locations.push(t);
                drops.push(1);
            }
        }
    }
    let mut counts = vec![0usize; drops.len() + 1];
    for i in (0..drops.len()).rev() {
        counts[i] = counts[i + 1] + drops[i];
    }
    Ok(CountStep { k, total: space.dim(), jump_locations, counts })
}

/// `L_k^NA = −(1/V) ∫ τ dh⁰(τ) = (1/V) Σ_j τ_j · (drop at τ_j)`.
pub fn lkna(curve: &TestCurve, k: u32, twist_margin: f64) -> Result<f64, QuantizeError> {
    let step = count_step(curve, k, twist_margin)?;
    Ok(lkna_of_step(&step, curve.polytope().total_mass()))
}

fn lkna_of_step(step: &CountStep, v: f64) -> f64 {
    step.drops().map(|(t, d)| t * d as f64).sum::<f64>() / v
}

/// `(1/V) [N_k τ⁺ + ∫_{−∞}^{τ⁺} (h⁰(τ) − N_k) dτ]`, evaluated on the steps;
/// `−∞` when some section never counts.
pub fn lkna_integral_form(step: &CountStep, tau_plus: f64, v: f64) -> f64 {
    let n = step.total as f64;
    if step.counts[0] < step.total {
        return f64::NEG_INFINITY;
    }
    let Some(&last) = step.jump_locations.last() else { return f64::NEG_INFINITY };
    let top = tau_plus.max(last);
    let mut integral = 0.0;
    for (i, w) in step.jump_locations.windows(2).enumerate() {
        integral += (step.counts[i + 1] as f64 - n) * (w[1] - w[0]);
    }
    integral += -n * (top - last);
    (n * top + integral) / v
}

/// Tail slope of `t ↦ L_k(r_t)`, with the sampled values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LkSlope {
    pub slope: f64,
    pub samples: Vec<(f64, f64)>,
    pub warnings: Vec<Warning>,
}

/// Slope of `L_k` along a ray over the tail `[T/2, T]` of its grid.
///
/// Convexity of `t ↦ L_k(r_t)` is checked on the samples; a violation is
/// reported as a positivity warning.
pub fn lk_ray_slope(ray: &Ray, k: u32, opts: &HilbertOptions) -> Result<LkSlope, QuantizeError> {
    let reference = hilbert_map(&DualPotential::reference(ray.polytope(), ray.grid()), k, opts)?;
    let samples = ray
        .t_grid()
        .iter()
        .map(|&t| Ok((t, lk_against(&ray.at(t)?, &reference, opts)?)))
        .collect::<Result<Vec<_>, QuantizeError>>()?;
    let half = ray.horizon() / 2.0;
    let (xs, ys): (Vec<f64>, Vec<f64>) = samples.iter().filter(|(t, _)| *t >= half).copied().unzip();
    let slope = ls_slope(&xs, &ys).ok_or_else(|| QuantizeError::Invalid("tail window needs two samples".into()))?;
    let (ts, ls): (Vec<f64>, Vec<f64>) = samples.iter().copied().unzip();
    let scale = 1.0 + ls.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let worst = second_differences(&ts, &ls).into_iter().fold(0.0f64, f64::min);
    let mut warnings = Vec::new();
    if worst < -1e-6 * scale {
        warnings.push(Warning::Positivity(format!("L_k along the ray fails convexity by {:.3e} at k = {k}", -worst)));
    }
    Ok(LkSlope { slope, samples, warnings })
}

/// `(λ_H(s_α), −k · min(τ_α, 0))`: the exponent of `s ↦ N_α(r_s)` and the
/// integrability threshold of `α` along the Legendre transform.
pub fn exponent_bridge(
    ray: &Ray,
    k: u32,
    alpha: &[i64],
    twist_margin: f64,
    opts: &HilbertOptions,
) -> Result<(f64, f64), QuantizeError> {
    let space = SectionSpace::new(ray.polytope(), k, twist_margin)?;
    let idx = space
        .lattice_points
        .iter()
        .position(|a| a.as_slice() == alpha)
        .ok_or_else(|| QuantizeError::Invalid(format!("{alpha:?} is not a lattice point of kP")))?;
    let mut logs = Vec::with_capacity(ray.t_grid().len());
    for &t in ray.t_grid() {
        let h = hilbert_map(&ray.at(t)?, k, opts)?;
        let v = h.log_norms[idx]
            .ok_or_else(|| QuantizeError::FiniteEnergy(format!("section {alpha:?} is not integrable at t = {t}")))?;
        logs.push((t, v));
    }
    // The family is taken to the power 1/k so long horizons stay in range.
    let base = logs[0].1;
    let kf = k as f64;
    let samples = logs
        .iter()
        .map(|(t, v)| Ok((*t, HermitianMetric::from_diag(&[((v - base) / kf).exp()])?)))
        .collect::<Result<Vec<_>, QuantizeError>>()?;
    let family = MetricFamily::Sampled(SampledFamily::new(samples, None)?);
    let lhs = kf * exponent(&family, &CVec::from_element(1, num_complex::Complex64::new(1.0, 0.0)))?;
    let curve = hat_curve(ray, &ray_taus(ray))?;
    let tau = curve.membership_threshold(&space.point(idx), twist_margin / k as f64);
    Ok((lhs, -(k as f64) * tau.min(0.0)))
}

/// `τ`-grid for sampled Legendre transforms: step `2^{−10}` across `[τ⁻, τ⁺]`.
fn ray_taus(ray: &Ray) -> Vec<f64> {
    let (lo, hi) = (ray.tau_minus(), ray.tau_plus());
    let h = 1.0 / 1024.0;
    let n = ((hi - lo) / h).ceil().max(1.0) as usize;
    let mut out: Vec<f64> = (0..=n).map(|i| lo + i as f64 * (hi - lo) / n as f64).collect();
    out.push(hi + h);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InaReport {
    /// `(k, (n!/k^n) L_k^NA)`.
    pub rows: Vec<(u32, f64)>,
    pub limit: f64,
    pub warnings: Vec<Warning>,
}

/// `I^NA` from the fit `(n!/k^n) L_k^NA ≈ a + b/k` over `k_list`.
pub fn ina(ray: &Ray, k_list: &[u32], twist_margin: f64) -> Result<InaReport, QuantizeError> {
    let curve = hat_curve(ray, &ray_taus(ray))?;
    let n = ray.polytope().dim();
    let rows = k_list
        .iter()
        .map(|&k| Ok((k, factorial(n) / (k as f64).powi(n as i32) * lkna(&curve, k, twist_margin)?)))
        .collect::<Result<Vec<_>, QuantizeError>>()?;
    let ks: Vec<f64> = rows.iter().map(|r| r.0 as f64).collect();
    let vs: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let limit = match fit_inverse_k(&ks, &vs) {
        Some((a, _)) => a,
        None => *vs.last().ok_or_else(|| QuantizeError::Invalid("empty k list".into()))?,
    };
    let mut warnings = Vec::new();
    let diffs: Vec<f64> = vs.windows(2).map(|w| w[1] - w[0]).collect();
    let scale = 1e-9 * (1.0 + limit.abs());
    if diffs.iter().any(|d| *d > scale) && diffs.iter().any(|d| *d < -scale) {
        warnings.push(Warning::Convergence("normalized L_k^NA is not monotone in k".into()));
    }
    Ok(InaReport { rows, limit, warnings })
}
