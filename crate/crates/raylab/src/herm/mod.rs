//! Finite-dimensional geometry of positive Hermitian inner products.
//!
//! For metrics `U0`, `U1` on `C^N` write `e^{λ_1} ≤ … ≤ e^{λ_N}` for the
//! eigenvalues of `U1` relative to `U0`. Then
//!
//! * `d1^V(U0, U1) = (1/N) Σ |λ_j|`,
//! * the geodesic is `diag(e^{tλ_j})` in a `U0`-orthonormal eigenbasis,
//! * passing to the dual space (`U ↦ (U⁻¹)ᵀ`) flips every `λ_j` and is an
//!   isometry.
//!
//! A family `s ↦ H_s` has exponents `λ_H(v) = limsup (1/s) log H_s(v,v)`; the
//! sublevel sets of `λ_H` form a filtration whose Stieltjes integral equals
//! the slope of `log det H_s` for positive families. Sampled families are
//! handled by least-squares regression over a tail window.

mod family;
pub mod json;
mod metric;

pub use family::{
    asymptotic_ray, det_slope, exponent, filtration_of, positivity_defect, stieltjes_integral, tail_slope,
    FamilyOptions, GeodesicRay, MetricFamily, SampledFamily, WeightFiltration,
};
pub use metric::{
    comparison_exponent, d1v_distance, dualize, geodesic_extrapolate, geodesic_point, hermitian_part,
    relative_eigen, CMat, CVec, HermitianMetric, RelativeEigen, DEFINITE_TOL, HERMITIAN_TOL,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HermError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("matrix is not Hermitian (relative defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:.3e}, norm {norm:.3e})")]
    NotDefinite { min_eigenvalue: f64, norm: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("unbounded exponent: {0}")]
    Unbounded(String),
}
