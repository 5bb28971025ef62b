//! Quantized functionals: Hilbert maps, `L_k`, section counts and `L_k^NA`.
//!
//! Sections of degree `k` are the lattice points `α ∈ kP ∩ Z^n`. The Hilbert
//! map of a potential is diagonal in this basis, and integrability of a
//! section against `e^{−ku}` is decided by the position of `α/k` relative to
//! the body of `u`.

mod hilbert;
mod lattice;
mod nonarch;

pub use hilbert::{d1k, hilbert_map, lk, HilbertMap, HilbertOptions, ReferenceMeasure, DEFAULT_BETA};
pub use lattice::{admits, bonavero_table, h0_count, BonaveroRow, BonaveroTable, SectionSpace};
pub use nonarch::{
    count_step, exponent_bridge, ina, lk_ray_slope, lkna, lkna_integral_form, CountStep, InaReport, LkSlope,
};

use crate::herm::HermError;
use crate::raycurve::RayError;
use crate::toric::ToricError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuantizeError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("finite-energy violation: {0}")]
    FiniteEnergy(String),
    #[error("dimension {0} is not supported by the Hilbert map")]
    UnsupportedDimension(usize),
    #[error(transparent)]
    Toric(#[from] ToricError),
    #[error(transparent)]
    Ray(#[from] RayError),
    #[error(transparent)]
    Herm(#[from] HermError),
}
