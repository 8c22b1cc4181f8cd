//! Schmidt decomposition `|psi> = sum_k lambda_k |s_k>|e_k>`.
//!
//! The system vectors are eigenvectors of `rho_S = C C^dagger` (cyclic
//! Jacobi). Each coefficient is then taken as the norm of `C^T conj(s_k)`
//! rather than the square root of the eigenvalue, which keeps coefficients
//! of null directions at rounding level instead of `sqrt(eps)`.

use alloc::vec::Vec;


use crate::error::{Error, Result};
use crate::linalg::{complete_orthonormal, hermitian_eigen, vec_norm, CMatrix, C64};
use crate::state::BipartiteState;

/// Coefficients at or below this are treated as zero.
pub const SCHMIDT_CUTOFF: f64 = 1e-12;
/// Tolerance for the decomposition invariants and for degeneracy grouping.
pub const SCHMIDT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct SchmidtDecomposition {
    coefficients: Vec<f64>,
    system_vectors: CMatrix,
    env_vectors: CMatrix,
}

impl SchmidtDecomposition {
    /// Validates a decomposition given as coefficients and the two
    /// column-vector matrices.
    pub fn new(coefficients: Vec<f64>, system_vectors: CMatrix, env_vectors: CMatrix) -> Result<Self> {
        let r = coefficients.len();
        if r == 0 {
            return Err(Error::ZeroState);
        }
        if system_vectors.cols() != r {
            return Err(Error::DimensionMismatch {
                expected: r,
                found: system_vectors.cols(),
            });
        }
        if env_vectors.cols() != r {
            return Err(Error::DimensionMismatch {
                expected: r,
                found: env_vectors.cols(),
            });
        }
        if coefficients.iter().any(|l| !l.is_finite()) || !system_vectors.is_finite() || !env_vectors.is_finite() {
            return Err(Error::NonFinite);
        }
        if coefficients.iter().any(|&l| l <= SCHMIDT_CUTOFF) || coefficients.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidTransform("coefficients must be positive and descending"));
        }
        let norm_sqr: f64 = coefficients.iter().map(|l| l * l).sum();
        if (norm_sqr - 1.0).abs() > SCHMIDT_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        for vecs in [&system_vectors, &env_vectors] {
            let defect = vecs.unitarity_defect();
            if defect > SCHMIDT_TOL {
                return Err(Error::NonOrthonormalBasis { defect });
            }
        }
        Ok(SchmidtDecomposition {
            coefficients,
            system_vectors,
            env_vectors,
        })
    }

    /// Descending, strictly positive coefficients `lambda_k`.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// `dim_s x rank`, orthonormal columns.
    pub fn system_vectors(&self) -> &CMatrix {
        &self.system_vectors
    }

    /// `dim_e x rank`, orthonormal columns.
    pub fn env_vectors(&self) -> &CMatrix {
        &self.env_vectors
    }

    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    pub fn system_vector(&self, k: usize) -> Vec<C64> {
        self.system_vectors.column(k)
    }

    pub fn env_vector(&self, k: usize) -> Vec<C64> {
        self.env_vectors.column(k)
    }

    /// The system vectors extended to an orthonormal basis of the whole
    /// system space; the first `rank` columns are the Schmidt vectors.
    pub fn completed_system_basis(&self) -> CMatrix {
        complete_columns(&self.system_vectors)
    }

    /// Environment counterpart of [`Self::completed_system_basis`].
    pub fn completed_env_basis(&self) -> CMatrix {
        complete_columns(&self.env_vectors)
    }

    /// Amplitudes of `state` in the labeled product basis `|s_k>|e_l>`:
    /// `T = S^dagger C conj(E)`, a `rank x rank` matrix. For `self` computed
    /// from `state` this is `diag(lambda)`.
    pub fn labeled_amplitudes(&self, state: &BipartiteState) -> Result<CMatrix> {
        if state.dim_s() != self.system_vectors.rows() {
            return Err(Error::DimensionMismatch {
                expected: self.system_vectors.rows(),
                found: state.dim_s(),
            });
        }
        if state.dim_e() != self.env_vectors.rows() {
            return Err(Error::DimensionMismatch {
                expected: self.env_vectors.rows(),
                found: state.dim_e(),
            });
        }
        Ok(self
            .system_vectors
            .adjoint()
            .matmul(state.amplitudes())
            .matmul(&self.env_vectors.conj()))
    }
}

fn complete_columns(vecs: &CMatrix) -> CMatrix {
    let n = vecs.rows();
    let cols: Vec<Option<Vec<C64>>> = (0..n)
        .map(|j| (j < vecs.cols()).then(|| vecs.column(j)))
        .collect();
    complete_orthonormal(n, &cols)
}

/// Schmidt decomposition of a bipartite pure state.
///
/// Each system vector is rotated so that its first entry of largest modulus
/// is real and nonnegative; the environment vector absorbs the conjugate
/// phase.
pub fn schmidt(psi: &BipartiteState) -> SchmidtDecomposition {
    let amps = psi.amplitudes();
    let (dim_s, dim_e) = (psi.dim_s(), psi.dim_e());
    let eig = hermitian_eigen(&psi.reduced_density_system());
    let amps_t = amps.transpose();

    let mut branches: Vec<(f64, Vec<C64>, Vec<C64>)> = Vec::with_capacity(dim_s);
    for k in 0..dim_s {
        let mut s = eig.vectors.column(k);
        let pivot = s
            .iter()
            .enumerate()
            .fold((0, 0.0), |best, (i, z)| if z.norm() > best.1 { (i, z.norm()) } else { best })
            .0;
        let p = s[pivot];
        if p.norm() > 0.0 {
            let phase = p.conj() / p.norm();
            for z in s.iter_mut() {
                *z *= phase;
            }
            s[pivot] = C64::new(s[pivot].re, 0.0);
        }
        let conj_s: Vec<C64> = s.iter().map(|z| z.conj()).collect();
        let e = amps_t.mul_vec(&conj_s);
        let lambda = vec_norm(&e);
        if lambda > SCHMIDT_CUTOFF {
            let e = e.into_iter().map(|z| z / lambda).collect();
            branches.push((lambda, s, e));
        }
    }
    // stable: equal coefficients keep the eigen-solver's order
    branches.sort_by(|a, b| b.0.total_cmp(&a.0));

    let coefficients = branches.iter().map(|b| b.0).collect();
    let s_cols: Vec<Vec<C64>> = branches.iter().map(|b| b.1.clone()).collect();
    let e_cols: Vec<Vec<C64>> = branches.into_iter().map(|b| b.2).collect();
    SchmidtDecomposition {
        coefficients,
        system_vectors: CMatrix::from_columns(dim_s, &s_cols),
        env_vectors: CMatrix::from_columns(dim_e, &e_cols),
    }
}

/// `sum_k lambda_k s_k e_k^T` as a unit-norm state.
pub fn reconstruct(d: &SchmidtDecomposition) -> BipartiteState {
    let lambda = CMatrix::diag_real(&d.coefficients);
    let amps = d
        .system_vectors
        .matmul(&lambda)
        .matmul(&d.env_vectors.transpose());
    BipartiteState::from_amplitudes(amps, true).expect("a valid decomposition is nonzero")
}

/// All coefficients within `tol` of each other.
pub fn is_even(d: &SchmidtDecomposition, tol: f64) -> bool {
    let max = d.coefficients.first().copied().unwrap_or(0.0);
    let min = d.coefficients.last().copied().unwrap_or(0.0);
    max - min <= tol
}

/// Groups branch indices (zero-based) into runs of coefficients that differ
/// pairwise by at most `tol`, in descending coefficient order.
pub fn degeneracy_blocks(d: &SchmidtDecomposition, tol: f64) -> Vec<Vec<usize>> {
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut head = f64::NAN;
    for (k, &l) in d.coefficients.iter().enumerate() {
        match blocks.last_mut() {
            Some(block) if head - l <= tol => block.push(k),
            _ => {
                head = l;
                blocks.push(alloc::vec![k]);
            }
        }
    }
    blocks
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::FRAC_1_SQRT_2;

    fn spectrum(lambdas: &[f64]) -> SchmidtDecomposition {
        let n = lambdas.len();
        SchmidtDecomposition::new(lambdas.to_vec(), CMatrix::identity(n), CMatrix::identity(n)).unwrap()
    }

    #[test]
    fn bell_decomposition() {
        let d = schmidt(&BipartiteState::bell());
        assert_eq!(d.rank(), 2);
        for &l in d.coefficients() {
            assert!((l - FRAC_1_SQRT_2).abs() < 1e-15);
        }
        assert!(is_even(&d, 1e-9));
        assert_eq!(reconstruct(&d), BipartiteState::bell());
    }

    #[test]
    fn product_decomposition() {
        let d = schmidt(&BipartiteState::product_basis(2, 2, 0, 0));
        assert_eq!(d.coefficients(), &[1.0]);
        assert_eq!(d.rank(), 1);
        let back = reconstruct(&d);
        assert_eq!(back, BipartiteState::product_basis(2, 2, 0, 0));
    }

    #[test]
    fn rectangular_state_reconstructs() {
        let psi = BipartiteState::from_real_rows(
            &[vec![0.1, 0.2, -0.3, 0.4], vec![0.5, 0.0, 0.1, -0.2], vec![0.3, 0.3, 0.2, 0.1]],
            true,
        )
        .unwrap();
        let d = schmidt(&psi);
        assert_eq!(d.rank(), 3);
        let back = reconstruct(&d);
        assert!(back.distance(&psi).unwrap() < 1e-12);
    }

    #[test]
    fn phase_convention_pivot_is_real_nonnegative() {
        let psi = BipartiteState::from_amplitudes(
            CMatrix::from_rows(&[
                vec![C64::new(0.1, 0.4), C64::new(0.0, -0.3)],
                vec![C64::new(-0.5, 0.2), C64::new(0.3, 0.3)],
            ]),
            true,
        )
        .unwrap();
        let d = schmidt(&psi);
        for k in 0..d.rank() {
            let s = d.system_vector(k);
            let max = s.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let pivot = s.iter().find(|z| z.norm() == max).unwrap();
            assert!(pivot.re >= 0.0 && pivot.im == 0.0);
        }
        assert!(reconstruct(&d).distance(&psi).unwrap() < 1e-12);
    }

    #[test]
    fn evenness_examples() {
        assert!(!is_even(&spectrum(&[(2.0f64 / 3.0).sqrt(), (1.0f64 / 3.0).sqrt()]), 1e-9));
        let h = 0.5f64.sqrt();
        // the perturbed pair is not exactly normalized, so skip validation
        let d = SchmidtDecomposition {
            coefficients: vec![h + 5e-10, h - 5e-10],
            system_vectors: CMatrix::identity(2),
            env_vectors: CMatrix::identity(2),
        };
        assert!(is_even(&d, 1e-8));
        assert!(!is_even(&d, 1e-10));
    }

    #[test]
    fn degeneracy_block_examples() {
        let h = FRAC_1_SQRT_2;
        assert_eq!(degeneracy_blocks(&spectrum(&[h, h]), 1e-9), vec![vec![0, 1]]);
        assert_eq!(
            degeneracy_blocks(&spectrum(&[(2.0f64 / 3.0).sqrt(), (1.0f64 / 3.0).sqrt()]), 1e-9),
            vec![vec![0], vec![1]]
        );
        let third = (1.0f64 - 2.0 * 0.36).sqrt();
        assert_eq!(
            degeneracy_blocks(&spectrum(&[0.6, 0.6, third]), 1e-9),
            vec![vec![0, 1], vec![2]]
        );
    }

    #[test]
    fn new_rejects_bad_input() {
        assert!(SchmidtDecomposition::new(vec![0.6, 0.8], CMatrix::identity(2), CMatrix::identity(2)).is_err());
        assert!(SchmidtDecomposition::new(vec![0.8, 0.6], CMatrix::identity(2), CMatrix::identity(3)).is_err());
        let skew = CMatrix::from_real_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]);
        assert!(matches!(
            SchmidtDecomposition::new(vec![0.8, 0.6], skew, CMatrix::identity(2)),
            Err(Error::NonOrthonormalBasis { .. })
        ));
    }

    #[test]
    fn labeled_amplitudes_of_own_state_are_diagonal() {
        let psi = BipartiteState::from_real_rows(&[vec![0.3, 0.4, 0.0], vec![0.0, 0.5, 0.7]], true).unwrap();
        let d = schmidt(&psi);
        let t = d.labeled_amplitudes(&psi).unwrap();
        assert!(t.max_abs_diff(&CMatrix::diag_real(d.coefficients())) < 1e-14);
    }

    #[test]
    fn completed_basis_extends_schmidt_vectors() {
        let psi = BipartiteState::product_basis(3, 2, 1, 0);
        let d = schmidt(&psi);
        let full = d.completed_system_basis();
        assert!(full.unitarity_defect() < 1e-14);
        assert_eq!(full.column(0), d.system_vector(0));
    }
}
