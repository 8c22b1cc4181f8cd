//! Seeded sampling helpers shared by the audits and the test suites.

use alloc::vec::Vec;

pub use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{gram_schmidt_q, CMatrix, C64};
use crate::state::{BipartiteState, LocalUnitary};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix of i.i.d. standard complex Gaussians (unit variance per entry).
pub fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    let scale = core::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re * scale, im * scale)
    })
}

/// Haar-distributed unitary: Gram-Schmidt of a Ginibre matrix, with the
/// triangular factor's diagonal real positive.
pub fn haar_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    gram_schmidt_q(&gaussian_matrix(rng, n, n))
}

pub fn haar_local_unitary(rng: &mut ChaCha8Rng, n: usize) -> LocalUnitary {
    LocalUnitary::new(haar_unitary(rng, n)).expect("Gram-Schmidt output is unitary")
}

/// Uniformly random pure state of a `dim_s x dim_e` system.
pub fn random_state(rng: &mut ChaCha8Rng, dim_s: usize, dim_e: usize) -> BipartiteState {
    BipartiteState::from_amplitudes(gaussian_matrix(rng, dim_s, dim_e), true)
        .expect("a Gaussian matrix is almost surely nonzero")
}

/// State with the given Schmidt coefficients in Haar-random local bases.
/// `coefficients` is normalized to unit sum of squares.
pub fn state_with_spectrum(
    rng: &mut ChaCha8Rng,
    dim_s: usize,
    dim_e: usize,
    coefficients: &[f64],
) -> BipartiteState {
    assert!(coefficients.len() <= dim_s.min(dim_e));
    let us = haar_unitary(rng, dim_s);
    let ue = haar_unitary(rng, dim_e);
    let mut core = CMatrix::zeros(dim_s, dim_e);
    for (k, &l) in coefficients.iter().enumerate() {
        core[(k, k)] = C64::new(l, 0.0);
    }
    let amps = us.matmul(&core).matmul(&ue.transpose());
    BipartiteState::from_amplitudes(amps, true).expect("nonzero spectrum")
}

/// Uniform real in `[lo, hi)`.
pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    use rand_core::RngCore;
    let bits = rng.next_u64() >> 11;
    lo + (hi - lo) * (bits as f64 / (1u64 << 53) as f64)
}

pub fn uniform_index(rng: &mut ChaCha8Rng, n: usize) -> usize {
    use rand_core::RngCore;
    (rng.next_u64() % n as u64) as usize
}

pub fn uniform_vec(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| uniform(rng, lo, hi)).collect()
}
