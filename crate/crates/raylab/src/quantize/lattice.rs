use serde::Serialize;

use super::QuantizeError;
use crate::stats::fit_inverse_k;
use crate::toric::{factorial, ConvexBody, DualPotential, Polytope};

/// Degree-`k` sections `α ∈ kP ∩ Z^n`. `twist_margin` widens the open
/// facets of a body by `twist_margin / k`; see [`admits`].
#[derive(Debug, Clone, PartialEq)]
pub struct SectionSpace {
    pub k: u32,
    pub lattice_points: Vec<Vec<i64>>,
    pub twist_margin: f64,
}

impl SectionSpace {
    pub fn new(polytope: &Polytope, k: u32, twist_margin: f64) -> Result<Self, QuantizeError> {
        if k == 0 {
            return Err(QuantizeError::Invalid("k must be positive".into()));
        }
        if !(twist_margin >= 0.0 && twist_margin.is_finite()) {
            return Err(QuantizeError::Invalid("twist margin must be a finite nonnegative number".into()));
        }
        Ok(SectionSpace { k, lattice_points: polytope.lattice_points(k), twist_margin })
    }

    pub fn dim(&self) -> usize {
        self.lattice_points.len()
    }

    /// `α / k`.
    pub fn point(&self, i: usize) -> Vec<f64> {
        self.lattice_points[i].iter().map(|a| *a as f64 / self.k as f64).collect()
    }
}

/// Integrability region of a body at level `k`. Facets lying on `∂P` are
/// closed, since the reference measure supplies the margin there; facets
/// interior to `P` are open, widened by `twist_margin / k`.
pub fn admits(body: &ConvexBody, polytope: &Polytope, p: &[f64], k: u32, twist_margin: f64) -> bool {
    let eps = 1e-9 / k as f64;
    let margin = twist_margin / k as f64;
    let facets = body.halfspaces();
    if facets.is_empty() {
        return margin > 0.0 && body.contains(p, margin);
    }
    let outer = polytope.body().halfspaces();
    facets.iter().all(|(nu, c)| {
        let e = nu.iter().zip(p).map(|(a, b)| a * b).sum::<f64>() - c;
        let on_boundary = outer
            .iter()
            .any(|(mu, d)| (c - d).abs() <= 1e-9 && nu.iter().zip(mu).all(|(a, b)| (a - b).abs() <= 1e-9));
        if on_boundary {
            e <= eps + margin
        } else {
            e < margin - eps
        }
    })
}

/// Number of sections integrable against `e^{−ku}`: lattice points `α` with
/// `α/k` in the integrability region of the body of `u`.
pub fn h0_count(u: &DualPotential, k: u32, twist_margin: f64) -> Result<usize, QuantizeError> {
    let space = SectionSpace::new(u.polytope(), k, twist_margin)?;
    Ok((0..space.dim()).filter(|&i| admits(u.body(), u.polytope(), &space.point(i), k, twist_margin)).count())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BonaveroRow {
    pub k: u32,
    /// `n! h⁰ / k^n`.
    pub ratio: f64,
    pub mass: f64,
    pub envelope_mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BonaveroTable {
    pub rows: Vec<BonaveroRow>,
    /// Intercept of the fit `ratio ≈ a + b/k`.
    pub limit: f64,
    /// `max_k k |ratio − mass|`.
    pub constant: f64,
}

/// Arithmetic volumes `n! h⁰(ku)/k^n` against the non-pluripolar mass.
pub fn bonavero_table(u: &DualPotential, k_list: &[u32], twist_margin: f64) -> Result<BonaveroTable, QuantizeError> {
    use rayon::prelude::*;
    let n = u.dim();
    let mass = u.mass();
    let envelope_mass = u.i_envelope().mass();
    let rows = k_list
        .par_iter()
        .map(|&k| {
            let c = h0_count(u, k, twist_margin)?;
            Ok(BonaveroRow { k, ratio: factorial(n) * c as f64 / (k as f64).powi(n as i32), mass, envelope_mass })
        })
        .collect::<Result<Vec<_>, QuantizeError>>()?;
    let ks: Vec<f64> = rows.iter().map(|r| r.k as f64).collect();
    let vs: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let limit = fit_inverse_k(&ks, &vs).map_or_else(|| *vs.last().unwrap_or(&f64::NAN), |(a, _)| a);
    let constant = rows.iter().map(|r| r.k as f64 * (r.ratio - r.mass).abs()).fold(0.0, f64::max);
    Ok(BonaveroTable { rows, limit, constant })
}
