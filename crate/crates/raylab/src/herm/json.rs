//! JSON forms: matrices as row-major `[re, im]` pairs, filtrations as
//! `{jumps, dims}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CMat, GeodesicRay, HermError, HermitianMetric, MetricFamily, SampledFamily, WeightFiltration};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMat) -> Self {
        let n = m.nrows();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let z = m[(i, j)];
                entries.push([z.re, z.im]);
            }
        }
        MatrixJson { dim: n, entries }
    }

    pub fn to_matrix(&self) -> Result<CMat, HermError> {
        let n = self.dim;
        if self.entries.len() != n * n {
            return Err(HermError::Shape(format!("expected {} entries, found {}", n * n, self.entries.len())));
        }
        Ok(CMat::from_fn(n, n, |i, j| {
            let [re, im] = self.entries[i * n + j];
            Complex64::new(re, im)
        }))
    }
}

impl From<&HermitianMetric> for MatrixJson {
    fn from(h: &HermitianMetric) -> Self {
        MatrixJson::from_matrix(h.matrix())
    }
}

impl TryFrom<&MatrixJson> for HermitianMetric {
    type Error = HermError;
    fn try_from(m: &MatrixJson) -> Result<Self, HermError> {
        HermitianMetric::new(m.to_matrix()?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleJson {
    pub s: f64,
    pub metric: MatrixJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyJson {
    Sampled {
        samples: Vec<SampleJson>,
        #[serde(default)]
        tail_window: Option<[f64; 2]>,
    },
    Generator {
        factor: MatrixJson,
        exponents: Vec<f64>,
    },
}

impl From<&MetricFamily> for FamilyJson {
    fn from(f: &MetricFamily) -> Self {
        match f {
            MetricFamily::Sampled(fam) => FamilyJson::Sampled {
                samples: fam.samples().iter().map(|(s, h)| SampleJson { s: *s, metric: h.into() }).collect(),
                tail_window: Some([fam.tail_window().0, fam.tail_window().1]),
            },
            MetricFamily::Generator(r) => FamilyJson::Generator {
                factor: MatrixJson::from_matrix(r.factor()),
                exponents: r.exponents().to_vec(),
            },
        }
    }
}

impl TryFrom<&FamilyJson> for MetricFamily {
    type Error = HermError;
    fn try_from(j: &FamilyJson) -> Result<Self, HermError> {
        match j {
            FamilyJson::Sampled { samples, tail_window } => {
                let samples = samples
                    .iter()
                    .map(|x| HermitianMetric::try_from(&x.metric).map(|h| (x.s, h)))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(MetricFamily::Sampled(SampledFamily::new(samples, tail_window.map(|w| (w[0], w[1])))?))
            }
            FamilyJson::Generator { factor, exponents } => {
                Ok(MetricFamily::Generator(GeodesicRay::new(factor.to_matrix()?, exponents.clone())?))
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiltrationJson {
    pub jumps: Vec<f64>,
    pub dims: Vec<usize>,
}

impl From<&WeightFiltration> for FiltrationJson {
    fn from(w: &WeightFiltration) -> Self {
        FiltrationJson { jumps: w.jumps().to_vec(), dims: w.dims().to_vec() }
    }
}

impl TryFrom<&FiltrationJson> for WeightFiltration {
    type Error = HermError;
    fn try_from(j: &FiltrationJson) -> Result<Self, HermError> {
        WeightFiltration::new(j.jumps.clone(), j.dims.clone())
    }
}
