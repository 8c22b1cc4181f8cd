//! Pure states on two and three factors, and unitaries acting on one factor.
//!
//! Amplitudes use the computational product basis `|j>_S (x) |k>_E`, stored
//! row-major with the system index first.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // float methods are inherent when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::schmidt::SchmidtDecomposition;

/// Tolerance on `|sum |a|^2 - 1|` for stored states.
pub const NORM_TOL: f64 = 1e-10;
/// Tolerance on `max |U^dagger U - I|` for local unitaries.
pub const UNITARY_TOL: f64 = 1e-10;

/// Pure state of a system `S` and environment `E`.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteState {
    amps: CMatrix,
}

impl BipartiteState {
    /// Validates `coeffs` (a `dim_s x dim_e` amplitude matrix) as a state.
    ///
    /// With `normalize` off the input must already have unit norm; with it on
    /// the input is rescaled.
    pub fn from_amplitudes(coeffs: CMatrix, normalize: bool) -> Result<Self> {
        if coeffs.rows() == 0 || coeffs.cols() == 0 {
            return Err(Error::EmptyDimension);
        }
        if !coeffs.is_finite() {
            return Err(Error::NonFinite);
        }
        let norm_sqr = coeffs.norm_sqr();
        if norm_sqr == 0.0 {
            return Err(Error::ZeroState);
        }
        if normalize {
            let inv = 1.0 / norm_sqr.sqrt();
            return Ok(BipartiteState {
                amps: coeffs.scale(C64::new(inv, 0.0)),
            });
        }
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(BipartiteState { amps: coeffs })
    }

    /// Builds a state from real amplitudes given row by row.
    pub fn from_real_rows(rows: &[Vec<f64>], normalize: bool) -> Result<Self> {
        Self::from_amplitudes(CMatrix::from_real_rows(rows), normalize)
    }

    /// `(|s_1 e_1> + |s_2 e_2>)/sqrt(2)` in the computational basis.
    pub fn bell() -> Self {
        Self::maximally_entangled(2)
    }

    /// `sum_k |k>|k> / sqrt(d)`.
    pub fn maximally_entangled(d: usize) -> Self {
        let a = (1.0 / d as f64).sqrt();
        let mut m = CMatrix::zeros(d, d);
        for k in 0..d {
            m[(k, k)] = C64::new(a, 0.0);
        }
        BipartiteState { amps: m }
    }

    /// `|j>|k>` with zero-based indices.
    pub fn product_basis(dim_s: usize, dim_e: usize, j: usize, k: usize) -> Self {
        let mut m = CMatrix::zeros(dim_s, dim_e);
        m[(j, k)] = C64::new(1.0, 0.0);
        BipartiteState { amps: m }
    }

    pub fn dim_s(&self) -> usize {
        self.amps.rows()
    }

    pub fn dim_e(&self) -> usize {
        self.amps.cols()
    }

    pub fn amplitudes(&self) -> &CMatrix {
        &self.amps
    }

    pub fn amplitude(&self, j: usize, k: usize) -> C64 {
        self.amps[(j, k)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.norm_sqr()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &BipartiteState) -> Result<C64> {
        self.check_same_shape(other)?;
        Ok(self
            .amps
            .as_slice()
            .iter()
            .zip(other.amps.as_slice())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Euclidean distance `||self - other||`.
    pub fn distance(&self, other: &BipartiteState) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self.amps.sub(&other.amps).frobenius_norm())
    }

    fn check_same_shape(&self, other: &BipartiteState) -> Result<()> {
        if self.dim_s() != other.dim_s() {
            return Err(Error::DimensionMismatch {
                expected: self.dim_s(),
                found: other.dim_s(),
            });
        }
        if self.dim_e() != other.dim_e() {
            return Err(Error::DimensionMismatch {
                expected: self.dim_e(),
                found: other.dim_e(),
            });
        }
        Ok(())
    }

    /// `(U (x) I) |psi>`, i.e. `amps' = U amps`.
    pub fn apply_system(&self, u: &LocalUnitary) -> Result<Self> {
        if u.dim() != self.dim_s() {
            return Err(Error::DimensionMismatch {
                expected: self.dim_s(),
                found: u.dim(),
            });
        }
        Ok(BipartiteState {
            amps: u.matrix().matmul(&self.amps),
        })
    }

    /// `(I (x) U) |psi>`, i.e. `amps' = amps U^T`.
    pub fn apply_env(&self, u: &LocalUnitary) -> Result<Self> {
        if u.dim() != self.dim_e() {
            return Err(Error::DimensionMismatch {
                expected: self.dim_e(),
                found: u.dim(),
            });
        }
        Ok(BipartiteState {
            amps: self.amps.matmul(&u.matrix().transpose()),
        })
    }

    /// Whether `self = e^{i theta} other` up to `tol` in norm. The returned
    /// `theta` is the argument of `<other|self>`, which minimizes the
    /// distance over all global phases.
    pub fn equal_up_to_global_phase(&self, other: &BipartiteState, tol: f64) -> Result<(bool, f64)> {
        let overlap = other.inner(self)?;
        let theta = if overlap.norm() == 0.0 { 0.0 } else { overlap.arg() };
        let rotated = other.amps.scale(C64::from_polar(1.0, theta));
        let dist = self.amps.sub(&rotated).frobenius_norm();
        Ok((dist <= tol, theta))
    }

    /// `rho_S = Tr_E |psi><psi| = amps amps^dagger`.
    pub fn reduced_density_system(&self) -> CMatrix {
        self.amps.matmul(&self.amps.adjoint())
    }

    /// `rho_E = Tr_S |psi><psi| = amps^T conj(amps)`.
    pub fn reduced_density_env(&self) -> CMatrix {
        self.amps.transpose().matmul(&self.amps.conj())
    }
}

/// A unitary acting on a single factor.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalUnitary {
    mat: CMatrix,
}

impl LocalUnitary {
    pub fn new(mat: CMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::DimensionMismatch {
                expected: mat.rows(),
                found: mat.cols(),
            });
        }
        if mat.rows() == 0 {
            return Err(Error::EmptyDimension);
        }
        if !mat.is_finite() {
            return Err(Error::NonFinite);
        }
        let defect = mat.unitarity_defect();
        if defect > UNITARY_TOL {
            return Err(Error::NotUnitary { defect });
        }
        Ok(LocalUnitary { mat })
    }

    pub fn identity(dim: usize) -> Self {
        LocalUnitary {
            mat: CMatrix::identity(dim),
        }
    }

    /// Diagonal unitary `diag(e^{i phases})` in the computational basis.
    pub fn diagonal_phases(phases: &[f64]) -> Self {
        let mut m = CMatrix::zeros(phases.len(), phases.len());
        for (k, &b) in phases.iter().enumerate() {
            m[(k, k)] = C64::from_polar(1.0, b);
        }
        LocalUnitary { mat: m }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    /// `self * other` (apply `other` first).
    pub fn compose(&self, other: &LocalUnitary) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(LocalUnitary {
            mat: self.mat.matmul(&other.mat),
        })
    }

    pub fn adjoint(&self) -> Self {
        LocalUnitary {
            mat: self.mat.adjoint(),
        }
    }

    /// Elementwise conjugate, also unitary.
    pub fn conj(&self) -> Self {
        LocalUnitary { mat: self.mat.conj() }
    }
}

/// Pure state of memory `M`, system `S` and environment `E`, indexed
/// `(memory, system, environment)` row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct TripartiteState {
    dim_m: usize,
    dim_s: usize,
    dim_e: usize,
    amps: Vec<C64>,
}

impl TripartiteState {
    pub fn new(dim_m: usize, dim_s: usize, dim_e: usize, amps: Vec<C64>) -> Result<Self> {
        if dim_m == 0 || dim_s == 0 || dim_e == 0 {
            return Err(Error::EmptyDimension);
        }
        let len = dim_m * dim_s * dim_e;
        if amps.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                found: amps.len(),
            });
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm_sqr: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if norm_sqr == 0.0 {
            return Err(Error::ZeroState);
        }
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(TripartiteState {
            dim_m,
            dim_s,
            dim_e,
            amps,
        })
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.dim_m, self.dim_s, self.dim_e)
    }

    #[inline]
    fn offset(&self, m: usize, s: usize, e: usize) -> usize {
        (m * self.dim_s + s) * self.dim_e + e
    }

    pub fn amplitude(&self, m: usize, s: usize, e: usize) -> C64 {
        self.amps[self.offset(m, s, e)]
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Reduced state of the system after tracing out memory and environment.
    pub fn reduced_density_system(&self) -> CMatrix {
        let mut rho = CMatrix::zeros(self.dim_s, self.dim_s);
        for m in 0..self.dim_m {
            for e in 0..self.dim_e {
                for s in 0..self.dim_s {
                    let a = self.amplitude(m, s, e);
                    for t in 0..self.dim_s {
                        rho[(s, t)] += a * self.amplitude(m, t, e).conj();
                    }
                }
            }
        }
        rho
    }

    /// Reduced state of the memory.
    pub fn reduced_density_memory(&self) -> CMatrix {
        let mut rho = CMatrix::zeros(self.dim_m, self.dim_m);
        for m in 0..self.dim_m {
            for n in 0..self.dim_m {
                let mut acc = C64::new(0.0, 0.0);
                for s in 0..self.dim_s {
                    for e in 0..self.dim_e {
                        acc += self.amplitude(m, s, e) * self.amplitude(n, s, e).conj();
                    }
                }
                rho[(m, n)] = acc;
            }
        }
        rho
    }
}

/// Correlates a memory register with the Schmidt branches of `psi`:
/// `sum_k lambda_k |mu_k>|s_k>|e_k>`, with memory index 0 reserved for the
/// ready state `mu_0` and branch `k` (zero-based) recorded at index `k + 1`.
pub fn premeasure(psi: &BipartiteState, basis: &SchmidtDecomposition) -> Result<TripartiteState> {
    let (dim_s, dim_e) = (psi.dim_s(), psi.dim_e());
    if basis.system_vectors().rows() != dim_s {
        return Err(Error::DimensionMismatch {
            expected: dim_s,
            found: basis.system_vectors().rows(),
        });
    }
    if basis.env_vectors().rows() != dim_e {
        return Err(Error::DimensionMismatch {
            expected: dim_e,
            found: basis.env_vectors().rows(),
        });
    }
    let rank = basis.rank();
    let dim_m = rank + 1;
    let mut amps = vec![C64::new(0.0, 0.0); dim_m * dim_s * dim_e];
    for (k, &lambda) in basis.coefficients().iter().enumerate() {
        let m = k + 1;
        for j in 0..dim_s {
            let sj = basis.system_vectors()[(j, k)];
            if sj.norm_sqr() == 0.0 {
                continue;
            }
            for l in 0..dim_e {
                amps[(m * dim_s + j) * dim_e + l] += sj * basis.env_vectors()[(l, k)] * lambda;
            }
        }
    }
    TripartiteState::new(dim_m, dim_s, dim_e, amps)
}
