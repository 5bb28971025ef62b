use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{ConvexBody, DualPotential, Grid, MaxAffine, Polytope, ToricError};

/// A coordinate given as a number or as an exact ratio `"p/q"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coord {
    Num(f64),
    Ratio(String),
}

impl Coord {
    pub fn value(&self) -> Result<f64, ToricError> {
        match self {
            Coord::Num(x) => Ok(*x),
            Coord::Ratio(s) => parse_coord(s),
        }
    }
}

pub fn parse_coord(s: &str) -> Result<f64, ToricError> {
    let bad = || ToricError::Invalid(format!("cannot parse coordinate {s:?}"));
    let v = match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| bad())?;
            let q: f64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0.0 {
                return Err(bad());
            }
            p / q
        }
        None => s.trim().parse().map_err(|_| bad())?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

fn points(raw: &[Vec<Coord>]) -> Result<Vec<Vec<f64>>, ToricError> {
    raw.iter().map(|p| p.iter().map(Coord::value).collect()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeJson {
    pub vertices: Vec<Vec<Coord>>,
}

impl PolytopeJson {
    pub fn build(&self) -> Result<Polytope, ToricError> {
        let pts = points(&self.vertices)?;
        let dim = pts.first().map(|p| p.len()).unwrap_or(0);
        Polytope::new(dim, &pts)
    }
}

/// One affine piece `p ↦ ⟨slope, p⟩ + offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceJson {
    pub slope: Vec<Coord>,
    pub offset: Coord,
}

/// A dual potential: body vertices (default `P`) and at most one of
/// piecewise-linear pieces `g = max_i (⟨a_i, p⟩ + b_i)`, `[p, g(p)]` samples
/// (dimension one, linearly interpolated) or polynomial coefficients
/// `c_0, c_1, …` (dimension one); none of them means `g ≡ 0`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialJson {
    #[serde(default)]
    pub body_vertices: Option<Vec<Vec<Coord>>>,
    #[serde(default)]
    pub g_pl_pieces: Option<Vec<PieceJson>>,
    #[serde(default)]
    pub g_samples: Option<Vec<Vec<Coord>>>,
    #[serde(default)]
    pub g_polynomial: Option<Vec<Coord>>,
}

impl PotentialJson {
    pub fn body(&self, polytope: &Polytope) -> Result<ConvexBody, ToricError> {
        match &self.body_vertices {
            None => Ok(polytope.body().clone()),
            Some(raw) => {
                let pts = points(raw)?;
                if pts.iter().any(|p| p.len() != polytope.dim()) {
                    return Err(ToricError::Invalid("body vertex has the wrong dimension".into()));
                }
                ConvexBody::hull(polytope.dim(), &pts).ok_or_else(|| ToricError::Invalid("empty body".into()))
            }
        }
    }

    pub fn pieces(&self, dim: usize) -> Result<Option<MaxAffine>, ToricError> {
        let Some(raw) = &self.g_pl_pieces else { return Ok(None) };
        let pieces = raw
            .iter()
            .map(|pc| Ok((pc.slope.iter().map(Coord::value).collect::<Result<Vec<_>, _>>()?, pc.offset.value()?)))
            .collect::<Result<Vec<_>, ToricError>>()?;
        MaxAffine::new(dim, pieces).map(Some)
    }

    pub fn build(&self, polytope: &Arc<Polytope>, grid: &Arc<Grid>) -> Result<DualPotential, ToricError> {
        let body = self.body(polytope)?;
        let given = [self.g_pl_pieces.is_some(), self.g_samples.is_some(), self.g_polynomial.is_some()];
        if given.iter().filter(|x| **x).count() > 1 {
            return Err(ToricError::Invalid("give at most one of g_pl_pieces, g_samples, g_polynomial".into()));
        }
        if (self.g_samples.is_some() || self.g_polynomial.is_some()) && polytope.dim() != 1 {
            return Err(ToricError::Invalid("g_samples and g_polynomial are supported in dimension one; use g_pl_pieces".into()));
        }
        if let Some(f) = self.pieces(polytope.dim())? {
            return DualPotential::from_fn(polytope, grid, body, |p| f.eval(p));
        }
        if let Some(raw) = &self.g_samples {
            let mut knots: Vec<(f64, f64)> = points(raw)?
                .into_iter()
                .map(|s| if s.len() == 2 { Ok((s[0], s[1])) } else { Err(ToricError::Invalid("samples are [p, g]".into())) })
                .collect::<Result<_, _>>()?;
            knots.sort_by(|a, b| a.0.total_cmp(&b.0));
            if knots.len() < 2 {
                return Err(ToricError::Invalid("need at least two samples".into()));
            }
            let interp = |x: f64| {
                let i = knots.partition_point(|k| k.0 < x).clamp(1, knots.len() - 1);
                let (a, b) = (knots[i - 1], knots[i]);
                a.1 + (b.1 - a.1) * (x - a.0) / (b.0 - a.0)
            };
            return DualPotential::from_fn(polytope, grid, body, |p| interp(p[0]));
        }
        if let Some(raw) = &self.g_polynomial {
            let c: Vec<f64> = raw.iter().map(Coord::value).collect::<Result<_, _>>()?;
            return DualPotential::from_fn(polytope, grid, body, |p| c.iter().rev().fold(0.0, |acc, a| acc * p[0] + a));
        }
        DualPotential::model(polytope, grid, body)
    }
}
