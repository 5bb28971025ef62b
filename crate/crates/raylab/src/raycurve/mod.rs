//! Geodesic rays, test curves and the Legendre duality between them.
//!
//! A ray is a family `g_t` of duals indexed by `t ≥ 0`; a test curve is a
//! family `g_τ` indexed by `τ`. They are exchanged pointwise in `p` by
//! `ĝ_τ = sup_t (g_t + tτ)` and `ǧ_t = inf_τ (g_τ − tτ)`.

mod chordal;
mod curve;
mod energy;
mod filtration;
mod ray;
mod transform;

pub use chordal::{chordal_d1c, ChordalEstimate};
pub use curve::{mass_curve, CurveData, TestCurve};
pub use energy::{
    energy_methods, ray_energy_slope, ray_energy_slope_with, DyadicRiemann, EnergyMethod, EnergyReport,
    EnergyValue, Linearity, MassQuadrature,
};
pub use filtration::{fekete_curve, from_filtration, ToricFiltration};
pub use ray::{default_t_grid, Ray, RayData, RaySlope, DEFAULT_HORIZON};
pub use transform::{check_ray, check_transform, hat_curve, hat_transform};

use crate::toric::ToricError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RayError {
    #[error("horizon too short: {0}")]
    Horizon(String),
    #[error("finite-energy violation: {0}")]
    FiniteEnergy(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Toric(#[from] ToricError),
}
