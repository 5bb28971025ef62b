use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::ScenarioError;
use crate::raycurve::{default_t_grid, Ray};
use crate::toric::{Coord, DualPotential, Grid, MaxAffine, PieceJson, Polytope, PolytopeJson, PotentialJson};

/// A toric potential on its polytope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToricCase {
    pub name: String,
    pub polytope: PolytopeJson,
    #[serde(default)]
    pub potential: PotentialJson,
    #[serde(default)]
    pub resolution: Option<f64>,
}

fn grid_for(poly: &Polytope, resolution: Option<f64>) -> Grid {
    match resolution {
        Some(r) => Grid::new(poly, r),
        None => Grid::default_for(poly),
    }
}

fn check_resolution(resolution: Option<f64>, location: &str) -> Result<(), ScenarioError> {
    match resolution {
        Some(r) if !(r > 0.0 && r <= 1.0) => Err(ScenarioError::schema(location, "resolution must lie in (0, 1]")),
        _ => Ok(()),
    }
}

impl ToricCase {
    /// `(P, grid, u)`; `resolution` is used when the case sets none.
    pub fn build(
        &self,
        resolution: Option<f64>,
        location: &str,
    ) -> Result<(Arc<Polytope>, Arc<Grid>, DualPotential), ScenarioError> {
        let res = self.resolution.or(resolution);
        check_resolution(res, location)?;
        let poly = Arc::new(self.polytope.build().map_err(|e| ScenarioError::schema(format!("{location}.polytope"), e))?);
        let grid = Arc::new(grid_for(&poly, res));
        let u = self.potential.build(&poly, &grid).map_err(|e| ScenarioError::schema(format!("{location}.potential"), e))?;
        Ok((poly, grid, u))
    }
}

/// The ray `g_t = t · max_i (⟨a_i, p⟩ + b_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RaySpec {
    pub name: String,
    pub polytope: PolytopeJson,
    pub slope: Vec<PieceJson>,
    /// Known value of the radial energy, checked when present.
    #[serde(default)]
    pub expected_energy: Option<Coord>,
    #[serde(default)]
    pub resolution: Option<f64>,
}

impl RaySpec {
    pub fn expected(&self, location: &str) -> Result<Option<f64>, ScenarioError> {
        self.expected_energy
            .as_ref()
            .map(|c| c.value().map_err(|e| ScenarioError::schema(format!("{location}.expected_energy"), e)))
            .transpose()
    }

    pub fn build(&self, resolution: Option<f64>, horizon: f64, location: &str) -> Result<Ray, ScenarioError> {
        let res = self.resolution.or(resolution);
        check_resolution(res, location)?;
        self.expected(location)?;
        if !(horizon >= 1.0 && horizon.is_finite()) {
            return Err(ScenarioError::schema(location, "horizon must be a finite number ≥ 1"));
        }
        let poly = Arc::new(self.polytope.build().map_err(|e| ScenarioError::schema(format!("{location}.polytope"), e))?);
        let grid = Arc::new(grid_for(&poly, res));
        let f = PotentialJson { g_pl_pieces: Some(self.slope.clone()), ..Default::default() }
            .pieces(poly.dim())
            .map_err(|e| ScenarioError::schema(format!("{location}.slope"), e))?
            .unwrap_or_else(|| MaxAffine::affine(vec![0.0; poly.dim()], 0.0));
        Ray::linear(&poly, &grid, f, default_t_grid(horizon)).map_err(|e| ScenarioError::schema(location, e))
    }
}
