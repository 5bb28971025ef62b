//! Numerical laboratory for geodesic rays, test curves and quantized
//! Monge–Ampère energies.
//!
//! Two models live side by side:
//!
//! * [`herm`]: finite-dimensional Hermitian metrics, their `d1` geometry,
//!   exponents, filtrations and determinant slopes.
//! * [`toric`]: torus-invariant potentials encoded by convex dual functions on
//!   a moment polytope. [`raycurve`] and [`quantize`] build rays, test curves,
//!   Hilbert maps and section counts on top of it.
//!
//! [`scenario`] wires everything into named, registry-dispatched batch runs.

pub mod diag;
pub mod herm;
pub mod quad;
pub mod quantize;
pub mod raycurve;
pub mod scenario;
pub mod stats;
pub mod toric;

pub use diag::{Estimate, Warning};
