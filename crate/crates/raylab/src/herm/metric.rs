use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};
use num_complex::Complex64;

use super::HermError;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Relative tolerance for the Hermitian symmetry check.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Smallest admissible eigenvalue relative to the largest one.
pub const DEFINITE_TOL: f64 = 1e-10;

/// A positive-definite Hermitian inner product on `C^N`, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMetric {
    m: CMat,
}

impl HermitianMetric {
    /// Validate and wrap a matrix. The stored matrix is the exact Hermitian
    /// part of the input.
    pub fn new(m: CMat) -> Result<Self, HermError> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(HermError::Shape(format!(
                "expected a nonempty square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let skew = (&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !scale.is_finite() || skew > HERMITIAN_TOL * scale.max(f64::MIN_POSITIVE) {
            return Err(HermError::NotHermitian { defect: skew / scale.max(f64::MIN_POSITIVE) });
        }
        let h = hermitian_part(&m);
        let eig = SymmetricEigen::new(h.clone()).eigenvalues;
        let max = eig.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(min > DEFINITE_TOL * max) {
            return Err(HermError::NotDefinite { min_eigenvalue: min, norm: max });
        }
        Ok(HermitianMetric { m: h })
    }

    pub fn identity(n: usize) -> Self {
        HermitianMetric { m: CMat::identity(n, n) }
    }

    /// Diagonal metric with the given positive entries.
    pub fn from_diag(d: &[f64]) -> Result<Self, HermError> {
        let v = DVector::from_iterator(d.len(), d.iter().map(|&x| Complex64::new(x, 0.0)));
        HermitianMetric::new(CMat::from_diagonal(&v))
    }

    /// `A · diag(d) · A*`, the congruence of a positive diagonal.
    pub fn congruence(a: &CMat, d: &[f64]) -> Result<Self, HermError> {
        if a.nrows() != a.ncols() || a.ncols() != d.len() {
            return Err(HermError::Shape("factor and diagonal disagree".into()));
        }
        let mut scaled = a.clone();
        for (j, &dj) in d.iter().enumerate() {
            scaled.column_mut(j).scale_mut(dj);
        }
        HermitianMetric::new(&scaled * a.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.m
    }

    /// `H(v, v) = v* H v`.
    pub fn quad_form(&self, v: &CVec) -> f64 {
        (v.adjoint() * &self.m * v)[(0, 0)].re
    }

    pub fn log_det(&self) -> f64 {
        // Cholesky cannot fail after validation; the diagonal of L is real positive.
        let l = Cholesky::new(self.m.clone()).expect("validated metric").unpack();
        2.0 * l.diagonal().iter().map(|z| z.re.ln()).sum::<f64>()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut e: Vec<f64> = SymmetricEigen::new(self.m.clone()).eigenvalues.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    fn cholesky(&self) -> Cholesky<Complex64, Dyn> {
        Cholesky::new(self.m.clone()).expect("validated metric")
    }
}

/// `(M + M*) / 2`.
pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

/// Eigen-decomposition of `U1` relative to `U0`.
///
/// `log_eigs` are ascending logarithms `λ_j` and `basis` has `U0`-orthonormal
/// columns with `basis* U1 basis = diag(e^{λ_j})`. `lower` is the Cholesky
/// factor of `U0`, and `rotation` the unitary diagonalizing `L⁻¹ U1 L⁻*`.
#[derive(Debug, Clone)]
pub struct RelativeEigen {
    pub log_eigs: Vec<f64>,
    pub basis: CMat,
    lower: CMat,
    rotation: CMat,
}

pub fn relative_eigen(u0: &HermitianMetric, u1: &HermitianMetric) -> Result<RelativeEigen, HermError> {
    check_same_dim(u0, u1)?;
    let chol = u0.cholesky();
    let l = chol.l();
    let n = u0.dim();
    // C = L⁻¹ U1 L⁻*, computed by two triangular solves.
    let y = l
        .solve_lower_triangular(u1.matrix())
        .ok_or_else(|| HermError::NotDefinite { min_eigenvalue: 0.0, norm: 0.0 })?;
    let c = l
        .solve_lower_triangular(&y.adjoint())
        .ok_or_else(|| HermError::NotDefinite { min_eigenvalue: 0.0, norm: 0.0 })?;
    let eig = SymmetricEigen::new(hermitian_part(&c));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut log_eigs = Vec::with_capacity(n);
    let mut rotation = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mu = eig.eigenvalues[src];
        if !(mu > 0.0) {
            return Err(HermError::NotDefinite { min_eigenvalue: mu, norm: 1.0 });
        }
        log_eigs.push(mu.ln());
        rotation.set_column(dst, &eig.eigenvectors.column(src));
    }
    let basis = l
        .adjoint()
        .solve_upper_triangular(&rotation)
        .ok_or_else(|| HermError::NotDefinite { min_eigenvalue: 0.0, norm: 0.0 })?;
    Ok(RelativeEigen { log_eigs, basis, lower: l, rotation })
}

impl RelativeEigen {
    /// `L W`, so that the geodesic reads `(LW) diag(e^{tλ}) (LW)*`.
    pub fn factor(&self) -> CMat {
        &self.lower * &self.rotation
    }
}

fn check_same_dim(a: &HermitianMetric, b: &HermitianMetric) -> Result<(), HermError> {
    if a.dim() != b.dim() {
        return Err(HermError::Shape(format!("dimension mismatch: {} vs {}", a.dim(), b.dim())));
    }
    Ok(())
}

/// `d1^V(U0, U1) = (1/N) Σ |λ_j|`.
pub fn d1v_distance(u0: &HermitianMetric, u1: &HermitianMetric) -> Result<f64, HermError> {
    let r = relative_eigen(u0, u1)?;
    Ok(r.log_eigs.iter().map(|l| l.abs()).sum::<f64>() / r.log_eigs.len() as f64)
}

/// `max_j |λ_j|`: the least `c` with `e^{-c} U1 ≤ U0 ≤ e^{c} U1`.
pub fn comparison_exponent(u0: &HermitianMetric, u1: &HermitianMetric) -> Result<f64, HermError> {
    let r = relative_eigen(u0, u1)?;
    Ok(r.log_eigs.iter().fold(0.0, |a, l| a.max(l.abs())))
}

/// Point at time `t ∈ [0,1]` on the `d1^V` geodesic from `U0` to `U1`.
pub fn geodesic_point(u0: &HermitianMetric, u1: &HermitianMetric, t: f64) -> Result<HermitianMetric, HermError> {
    if !(0.0..=1.0).contains(&t) {
        return Err(HermError::Domain(format!("geodesic parameter {t} outside [0,1]")));
    }
    geodesic_extrapolate(u0, u1, t)
}

/// Same as [`geodesic_point`] but accepting any real `t`.
pub fn geodesic_extrapolate(u0: &HermitianMetric, u1: &HermitianMetric, t: f64) -> Result<HermitianMetric, HermError> {
    if t == 0.0 {
        check_same_dim(u0, u1)?;
        return Ok(u0.clone());
    }
    if t == 1.0 {
        check_same_dim(u0, u1)?;
        return Ok(u1.clone());
    }
    let r = relative_eigen(u0, u1)?;
    let d: Vec<f64> = r.log_eigs.iter().map(|l| (t * l).exp()).collect();
    HermitianMetric::congruence(&r.factor(), &d)
}

/// Induced metric on the dual space: `(U⁻¹)ᵀ` in the fixed basis.
pub fn dualize(u: &HermitianMetric) -> HermitianMetric {
    let inv = u.cholesky().inverse();
    HermitianMetric::new(hermitian_part(&inv.transpose()))
        .expect("inverse of a definite metric is definite")
}
