//! Envariance: a system-side unitary `u_S` is envariant for `|psi>` when
//! some environment-side unitary `u_E` undoes it, `(I (x) u_E)(u_S (x) I)|psi> = |psi>`.
//!
//! [`check_envariance`] decides this constructively from the Schmidt form:
//! with `a = S^dagger u_S S` in a completed Schmidt system basis, `u_S` is
//! envariant iff `a` is block diagonal over the degeneracy blocks of the
//! coefficients, the zero block included. The counter is then
//! `E conj(a_B) E^dagger` on each nonzero block and identity elsewhere.
//!
//! [`oracle_best_counter`] is an independent check: it solves the
//! orthogonal Procrustes problem for the best environment unitary and
//! reports the residual, with no reference to Schmidt blocks.

use alloc::vec;
use alloc::vec::Vec;


use crate::error::{Error, Result};
use crate::linalg::{polar_unitary, CMatrix, C64};
use crate::schmidt::{degeneracy_blocks, schmidt, SCHMIDT_TOL};
use crate::state::{BipartiteState, LocalUnitary};

/// Residual bound for a successful counter.
pub const ENVAR_TOL: f64 = 1e-9;
/// Orthonormality bound on bases handed to the transform builders.
pub const BASIS_TOL: f64 = 1e-10;

/// How the counter's residual is measured.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EqualityMode {
    /// `||u_E u_S psi - psi|| <= tol`.
    #[default]
    Strict,
    /// Same, after removing the best global phase.
    UpToGlobalPhase,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnvarianceVerdict {
    pub envariant: bool,
    /// The environment-side unitary undoing `u_S`, when one exists.
    pub counter: Option<LocalUnitary>,
    /// Counter residual when envariant, otherwise the oracle's best residual.
    pub residual: f64,
}

fn check_basis(basis: &CMatrix) -> Result<()> {
    if basis.cols() == 0 || basis.cols() > basis.rows() {
        return Err(Error::NonOrthonormalBasis { defect: f64::INFINITY });
    }
    let defect = basis.unitarity_defect();
    if defect > BASIS_TOL {
        return Err(Error::NonOrthonormalBasis { defect });
    }
    Ok(())
}

fn outer(a: &[C64], b: &[C64]) -> CMatrix {
    CMatrix::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
}

/// `sum_j e^{i beta_j} |b_j><b_j|` on the listed basis vectors, identity on
/// their orthogonal complement. Indices are zero-based columns of `basis`.
pub fn phase_transform(indices: &[usize], betas: &[f64], basis: &CMatrix) -> Result<LocalUnitary> {
    check_basis(basis)?;
    if indices.len() != betas.len() {
        return Err(Error::InvalidTransform("one phase is needed per index"));
    }
    for (n, &i) in indices.iter().enumerate() {
        if i >= basis.cols() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: basis.cols(),
            });
        }
        if indices[..n].contains(&i) {
            return Err(Error::InvalidTransform("phase indices must be distinct"));
        }
    }
    let dim = basis.rows();
    let mut u = CMatrix::identity(dim);
    for (&i, &beta) in indices.iter().zip(betas) {
        if !beta.is_finite() {
            return Err(Error::NonFinite);
        }
        let b = basis.column(i);
        let shift = C64::from_polar(1.0, beta) - C64::new(1.0, 0.0);
        u = u.add(&outer(&b, &b).scale(shift));
    }
    LocalUnitary::new(u)
}

/// `|b_i><b_j| + |b_j><b_i|` plus identity on the rest. Zero-based.
pub fn swap_transform(i: usize, j: usize, basis: &CMatrix) -> Result<LocalUnitary> {
    check_basis(basis)?;
    for idx in [i, j] {
        if idx >= basis.cols() {
            return Err(Error::IndexOutOfRange {
                index: idx,
                len: basis.cols(),
            });
        }
    }
    if i == j {
        return Err(Error::InvalidTransform("a swap needs two distinct indices"));
    }
    let (bi, bj) = (basis.column(i), basis.column(j));
    let u = CMatrix::identity(basis.rows())
        .sub(&outer(&bi, &bi))
        .sub(&outer(&bj, &bj))
        .add(&outer(&bi, &bj))
        .add(&outer(&bj, &bi));
    LocalUnitary::new(u)
}

fn residual(psi: &BipartiteState, u_s: &LocalUnitary, u_e: &LocalUnitary, mode: EqualityMode) -> Result<f64> {
    let out = psi.apply_system(u_s)?.apply_env(u_e)?;
    match mode {
        EqualityMode::Strict => out.distance(psi),
        EqualityMode::UpToGlobalPhase => {
            let (_, theta) = out.equal_up_to_global_phase(psi, 0.0)?;
            let aligned = psi.amplitudes().scale(C64::from_polar(1.0, theta));
            Ok(out.amplitudes().sub(&aligned).frobenius_norm())
        }
    }
}

/// Constructive envariance decision in strict mode.
pub fn check_envariance(psi: &BipartiteState, u_s: &LocalUnitary) -> Result<EnvarianceVerdict> {
    check_envariance_with(psi, u_s, EqualityMode::Strict)
}

pub fn check_envariance_with(
    psi: &BipartiteState,
    u_s: &LocalUnitary,
    mode: EqualityMode,
) -> Result<EnvarianceVerdict> {
    if u_s.dim() != psi.dim_s() {
        return Err(Error::DimensionMismatch {
            expected: psi.dim_s(),
            found: u_s.dim(),
        });
    }
    let d = schmidt(psi);
    let rank = d.rank();
    let s_full = d.completed_system_basis();
    let a = s_full.adjoint().matmul(u_s.matrix()).matmul(&s_full);

    let mut blocks = degeneracy_blocks(&d, SCHMIDT_TOL);
    if rank < psi.dim_s() {
        blocks.push((rank..psi.dim_s()).collect());
    }
    let mut block_of = vec![0usize; psi.dim_s()];
    for (b, block) in blocks.iter().enumerate() {
        for &k in block {
            block_of[k] = b;
        }
    }
    let mut leakage = 0.0f64;
    for i in 0..psi.dim_s() {
        for j in 0..psi.dim_s() {
            if block_of[i] != block_of[j] {
                leakage = leakage.max(a[(i, j)].norm());
            }
        }
    }

    if leakage <= ENVAR_TOL {
        let e_full = d.completed_env_basis();
        let mut w = CMatrix::identity(psi.dim_e());
        for block in blocks.iter().filter(|b| b[0] < rank) {
            let n = block.len();
            let sub = CMatrix::from_fn(n, n, |x, y| a[(block[x], block[y])].conj());
            let sub = polar_unitary(&sub);
            for (x, &p) in block.iter().enumerate() {
                for (y, &q) in block.iter().enumerate() {
                    w[(p, q)] = sub[(x, y)];
                }
            }
        }
        let counter = LocalUnitary::new(e_full.matmul(&w).matmul(&e_full.adjoint()))?;
        let res = residual(psi, u_s, &counter, mode)?;
        if res <= ENVAR_TOL {
            return Ok(EnvarianceVerdict {
                envariant: true,
                counter: Some(counter),
                residual: res,
            });
        }
    }

    let (_, best) = oracle_best_counter_with(psi, u_s, mode)?;
    Ok(EnvarianceVerdict {
        envariant: false,
        counter: None,
        residual: best,
    })
}

/// The environment unitary closest to undoing `u_s` on `psi`, by
/// orthogonal Procrustes, and its strict residual.
///
/// With `C` the amplitudes and `B = u_s C`, the residual is
/// `||B V^T - C||`. Writing `M = B^T conj(C)`, the minimizer is
/// `V = polar(M)^dagger`, completed by identity on the null space.
pub fn oracle_best_counter(psi: &BipartiteState, u_s: &LocalUnitary) -> Result<(LocalUnitary, f64)> {
    oracle_best_counter_with(psi, u_s, EqualityMode::Strict)
}

pub fn oracle_best_counter_with(
    psi: &BipartiteState,
    u_s: &LocalUnitary,
    mode: EqualityMode,
) -> Result<(LocalUnitary, f64)> {
    if u_s.dim() != psi.dim_s() {
        return Err(Error::DimensionMismatch {
            expected: psi.dim_s(),
            found: u_s.dim(),
        });
    }
    let c = psi.amplitudes();
    let b = u_s.matrix().matmul(c);
    let m = b.transpose().matmul(&c.conj());
    let v = LocalUnitary::new(polar_unitary(&m).adjoint())?;
    let res = residual(psi, u_s, &v, mode)?;
    Ok((v, res))
}

/// Schmidt-basis swap of branches `i`, `j` (zero-based) for `psi`; indices
/// past the rank address the completed basis.
pub fn schmidt_swap(psi: &BipartiteState, i: usize, j: usize) -> Result<LocalUnitary> {
    swap_transform(i, j, &schmidt(psi).completed_system_basis())
}

/// Schmidt-basis phase transform `e^{i betas[k]}` on branch `k`.
pub fn schmidt_phase(psi: &BipartiteState, betas: &[f64]) -> Result<LocalUnitary> {
    let indices: Vec<usize> = (0..betas.len()).collect();
    phase_transform(&indices, betas, &schmidt(psi).completed_system_basis())
}
