use serde::Serialize;

use super::ray::{zero_sublevel, Ray, RayData, RaySlope};
use super::transform::hat_transform;
use super::RayError;
use crate::quad;
use crate::toric::factorial;

/// One estimate of the radial energy, with an enclosing bracket when the
/// method produces one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyValue {
    pub value: f64,
    pub bracket: Option<(f64, f64)>,
}

/// A way of computing `lim I(r_t) / t`.
pub trait EnergyMethod: Send + Sync {
    fn name(&self) -> &'static str;
    fn estimate(&self, ray: &Ray) -> Result<EnergyValue, RayError>;
}

/// `I(r_1)` by linearity of `I` along geodesics; `I(r_T)/T` for sampled rays.
#[derive(Debug, Clone, Copy, Default)]
pub struct Linearity;

/// `τ⁺ + ∫_{τ⁻}^{τ⁺} (mass(r̂_τ)/V − 1) dτ` by composite Gauss–Kronrod.
#[derive(Debug, Clone, Copy)]
pub struct MassQuadrature {
    pub panels: usize,
}

/// Dyadic Riemann sums with step `2^{−level}` bracketing the mass integral.
#[derive(Debug, Clone, Copy)]
pub struct DyadicRiemann {
    pub level: u32,
}

impl Default for MassQuadrature {
    fn default() -> Self {
        MassQuadrature { panels: 128 }
    }
}

impl Default for DyadicRiemann {
    fn default() -> Self {
        DyadicRiemann { level: 10 }
    }
}

/// Mass of `r̂_τ`.
fn hat_mass(ray: &Ray, tau: f64) -> Result<f64, RayError> {
    let poly = ray.polytope();
    let nf = factorial(poly.dim());
    let body = match ray.data() {
        RayData::Linear(RaySlope::Pl(f)) => f.sublevel(poly, -tau),
        RayData::Linear(RaySlope::Sampled(f)) => {
            let phi: Vec<f64> = f.values().iter().map(|v| v + tau).collect();
            zero_sublevel(poly, ray.grid(), &phi, &|p| f.eval(p) + tau)
        }
        RayData::Sampled(_) => hat_transform(ray, tau)?.map(|p| p.body().clone()),
    };
    Ok(body.map_or(0.0, |b| nf * b.volume()))
}

fn bounds(ray: &Ray) -> Result<(f64, f64), RayError> {
    let (lo, hi) = (ray.tau_minus(), ray.tau_plus());
    if !lo.is_finite() || !hi.is_finite() || lo > hi + 1e-12 {
        return Err(RayError::FiniteEnergy(format!("cannot bound the mass integral on [{lo}, {hi}]")));
    }
    Ok((lo.min(hi), hi))
}

impl EnergyMethod for Linearity {
    fn name(&self) -> &'static str {
        "linearity"
    }

    fn estimate(&self, ray: &Ray) -> Result<EnergyValue, RayError> {
        let t = if ray.slope().is_some() { 1.0 } else { ray.horizon() };
        let e = ray.at(t)?.energy_i();
        if !e.is_finite() {
            return Err(RayError::FiniteEnergy(format!("I(r_{t}) is not finite")));
        }
        Ok(EnergyValue { value: e / t, bracket: None })
    }
}

impl EnergyMethod for MassQuadrature {
    fn name(&self) -> &'static str {
        "mass_quadrature"
    }

    fn estimate(&self, ray: &Ray) -> Result<EnergyValue, RayError> {
        let (lo, hi) = bounds(ray)?;
        let v = ray.polytope().total_mass();
        if hi - lo <= 0.0 {
            return Ok(EnergyValue { value: hi, bracket: None });
        }
        // Errors from the integrand are collected and raised after the sum.
        let failure = std::cell::RefCell::new(None);
        let f = |tau: f64| match hat_mass(ray, tau) {
            Ok(m) => m / v - 1.0,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        };
        let integral = quad::composite(&f, lo, hi, self.panels);
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        Ok(EnergyValue { value: hi + integral, bracket: None })
    }
}

impl EnergyMethod for DyadicRiemann {
    fn name(&self) -> &'static str {
        "dyadic_riemann"
    }

    fn estimate(&self, ray: &Ray) -> Result<EnergyValue, RayError> {
        let (lo, hi) = bounds(ray)?;
        let v = ray.polytope().total_mass();
        let scale = 2f64.powi(self.level as i32);
        let h = 1.0 / scale;
        // Normalized so that τ⁺ = 0; M is the largest integer ≤ 2^N τ⁻.
        let m = ((lo - hi) * scale).floor() as i64;
        let masses: Vec<f64> =
            (m..=0).map(|j| Ok(hat_mass(ray, hi + j as f64 * h)? / v - 1.0)).collect::<Result<_, RayError>>()?;
        let lower: f64 = masses[1..].iter().map(|x| h * x).sum();
        let upper: f64 = masses[..masses.len() - 1].iter().map(|x| h * x).sum();
        Ok(EnergyValue { value: hi + 0.5 * (lower + upper), bracket: Some((hi + lower, hi + upper)) })
    }
}

/// The default methods, in reporting order.
pub fn energy_methods() -> Vec<Box<dyn EnergyMethod>> {
    vec![Box::new(Linearity), Box::<MassQuadrature>::default(), Box::<DyadicRiemann>::default()]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport {
    pub values: Vec<(String, f64)>,
    pub bracket: Option<(f64, f64)>,
    pub max_deviation: f64,
}

impl EnergyReport {
    pub fn value(&self, name: &str) -> Option<f64> {
        self.values.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

pub fn ray_energy_slope(ray: &Ray) -> Result<EnergyReport, RayError> {
    ray_energy_slope_with(ray, &energy_methods())
}

pub fn ray_energy_slope_with(ray: &Ray, methods: &[Box<dyn EnergyMethod>]) -> Result<EnergyReport, RayError> {
    let mut values = Vec::with_capacity(methods.len());
    let mut bracket = None;
    for m in methods {
        let e = m.estimate(ray)?;
        values.push((m.name().to_string(), e.value));
        bracket = bracket.or(e.bracket);
    }
    let mut max_deviation = 0.0f64;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            max_deviation = max_deviation.max((a.1 - b.1).abs());
        }
    }
    Ok(EnergyReport { values, bracket, max_deviation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raycurve::ray::default_t_grid;
    use crate::toric::{Grid, MaxAffine, Polytope};
    use std::sync::Arc;

    #[test]
    fn half_slope() {
        let p = Arc::new(Polytope::unit_interval());
        let g = Arc::new(Grid::default_for(&p));
        let r = Ray::linear(&p, &g, MaxAffine::affine(vec![1.0], 0.0), default_t_grid(8.0)).unwrap();
        let rep = ray_energy_slope(&r).unwrap();
        for (_, v) in &rep.values {
            assert!((v + 0.5).abs() < 1e-9, "{rep:?}");
        }
        let (lo, hi) = rep.bracket.unwrap();
        assert!(lo <= -0.5 && -0.5 <= hi && hi - lo < 2e-3);
        let shifted = ray_energy_slope(&r.shifted(0.25)).unwrap();
        assert!(shifted.values.iter().all(|(_, v)| (v + 0.25).abs() < 1e-9));
    }

    #[test]
    fn constant_ray() {
        let p = Arc::new(Polytope::unit_square());
        let g = Arc::new(Grid::new(&p, 1.0 / 16.0));
        let r = Ray::constant(&p, &g, default_t_grid(4.0)).unwrap();
        let rep = ray_energy_slope(&r).unwrap();
        assert!(rep.values.iter().all(|(_, v)| v.abs() < 1e-12));
    }
}
