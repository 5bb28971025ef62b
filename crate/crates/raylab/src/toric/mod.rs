//! Torus-invariant potentials on a moment polytope.
//!
//! A potential is encoded by its convex dual `g` on a body `Q ⊆ P`. Mass is
//! `n! · vol(Q)`, the energy is `−(1/vol P) ∫ g`, the rooftop envelope is the
//! pointwise max of duals, and the model envelope zeroes `g` on `Q`.

pub mod geometry;
mod grid;
mod json;
mod massgap;
mod maxaffine;
mod polytope;
mod potential;

pub use geometry::{mixed_area, ConvexBody};
pub use grid::{Grid, DEFAULT_RESOLUTION_1D, DEFAULT_RESOLUTION_2D};
pub use json::{parse_coord, Coord, PieceJson, PolytopeJson, PotentialJson};
pub use massgap::{mixed_mass_gap, MassGapReport};
pub use maxaffine::MaxAffine;
pub use polytope::{factorial, Polytope};
pub use potential::{legendre_dual_1d, legendre_dual_2d, DualPotential, PrimalPl, SampleGrid2};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ToricError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("convexity violated: {0}")]
    NotConvex(String),
    #[error("potentials live on different polytopes or grids")]
    Mismatch,
    #[error("rooftop of potentials with disjoint bodies is empty")]
    EmptyRooftop,
    #[error("finite-energy violation: {0}")]
    FiniteEnergy(String),
    #[error("dimension {0} is not supported")]
    UnsupportedDimension(usize),
}
