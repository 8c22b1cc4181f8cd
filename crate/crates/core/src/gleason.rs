//! Frame-function audits.
//!
//! A frame function assigns a nonnegative number to each unit vector and
//! sums to one over every orthonormal basis. In dimension three and up the
//! only such functions are `<v|rho|v>`. The audit samples Haar-random bases
//! and reports the worst deviation of the frame sum from one, so it can
//! falsify a candidate but never prove one.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)] // float methods are inherent when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, inner, vec_norm, CMatrix, C64};
use crate::random::{haar_unitary, rng};

/// Verdict threshold on the largest `|frame_sum - 1|`.
pub const FRAME_TOL: f64 = 1e-9;
/// Orthonormality bound for sampled bases.
pub const BASIS_TOL: f64 = 1e-10;

type Evaluator = Box<dyn Fn(&[C64]) -> f64 + Send + Sync>;

pub enum FrameFunction {
    /// `p(v) = <v|rho|v>` for a density matrix `rho`.
    Quadratic(CMatrix),
    /// `p(v) = |<v|w>|^alpha` for a fixed unit vector `w`.
    PowerOverlap { w: Vec<C64>, alpha: f64 },
    Custom { name: &'static str, dim: Option<usize>, eval: Evaluator },
}

impl fmt::Debug for FrameFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameFunction::Quadratic(rho) => f.debug_tuple("Quadratic").field(rho).finish(),
            FrameFunction::PowerOverlap { w, alpha } => f
                .debug_struct("PowerOverlap")
                .field("w", w)
                .field("alpha", alpha)
                .finish(),
            FrameFunction::Custom { name, dim, .. } => {
                f.debug_struct("Custom").field("name", name).field("dim", dim).finish()
            }
        }
    }
}

impl FrameFunction {
    /// Validated `Quadratic`: Hermitian, trace one, positive semidefinite.
    pub fn quadratic(rho: CMatrix) -> Result<Self> {
        if !rho.is_square() || rho.rows() == 0 {
            return Err(Error::InvalidDensity("density matrix must be square"));
        }
        if !rho.is_finite() {
            return Err(Error::NonFinite);
        }
        if rho.hermiticity_defect() > 1e-10 {
            return Err(Error::InvalidDensity("density matrix must be Hermitian"));
        }
        if (rho.trace().re - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidDensity("density matrix must have unit trace"));
        }
        if hermitian_eigen(&rho).values.last().copied().unwrap_or(0.0) < -1e-10 {
            return Err(Error::InvalidDensity("density matrix must be positive semidefinite"));
        }
        Ok(FrameFunction::Quadratic(rho))
    }

    /// Validated `PowerOverlap`; `w` is normalized.
    pub fn power_overlap(w: Vec<C64>, alpha: f64) -> Result<Self> {
        let n = vec_norm(&w);
        if w.is_empty() || n == 0.0 || !n.is_finite() || !alpha.is_finite() {
            return Err(Error::InvalidDensity("overlap vector must be nonzero and finite"));
        }
        Ok(FrameFunction::PowerOverlap {
            w: w.into_iter().map(|z| z / n).collect(),
            alpha,
        })
    }

    /// `|<v|e_1>|^alpha` in dimension `dim`.
    pub fn power_of_first_axis(dim: usize, alpha: f64) -> Result<Self> {
        let mut w = alloc::vec![C64::new(0.0, 0.0); dim];
        if let Some(first) = w.first_mut() {
            *first = C64::new(1.0, 0.0);
        }
        Self::power_overlap(w, alpha)
    }

    /// Maximally mixed state `I / dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        FrameFunction::Quadratic(CMatrix::identity(dim).scale(C64::new(1.0 / dim as f64, 0.0)))
    }

    pub fn custom(name: &'static str, dim: Option<usize>, eval: impl Fn(&[C64]) -> f64 + Send + Sync + 'static) -> Self {
        FrameFunction::Custom {
            name,
            dim,
            eval: Box::new(eval),
        }
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            FrameFunction::Quadratic(rho) => Some(rho.rows()),
            FrameFunction::PowerOverlap { w, .. } => Some(w.len()),
            FrameFunction::Custom { dim, .. } => *dim,
        }
    }

    /// Short label for reports: `quadratic`, `power:<alpha>`, or the custom name.
    pub fn kind(&self) -> alloc::string::String {
        match self {
            FrameFunction::Quadratic(_) => "quadratic".into(),
            FrameFunction::PowerOverlap { alpha, .. } => alloc::format!("power:{alpha}"),
            FrameFunction::Custom { name, .. } => (*name).into(),
        }
    }

    pub fn evaluate(&self, v: &[C64]) -> f64 {
        match self {
            FrameFunction::Quadratic(rho) => inner(v, &rho.mul_vec(v)).re,
            FrameFunction::PowerOverlap { w, alpha } => inner(v, w).norm().powf(*alpha),
            FrameFunction::Custom { eval, .. } => eval(v),
        }
    }
}

/// An orthonormal basis (columns of `vectors`) and the seed that drew it.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisSample {
    pub vectors: CMatrix,
    pub seed: u64,
}

impl BasisSample {
    pub fn dim(&self) -> usize {
        self.vectors.rows()
    }

    /// Any explicit basis, checked for orthonormality.
    pub fn from_vectors(vectors: CMatrix) -> Result<Self> {
        if !vectors.is_square() {
            return Err(Error::NonOrthonormalBasis { defect: f64::INFINITY });
        }
        let defect = vectors.unitarity_defect();
        if defect > BASIS_TOL {
            return Err(Error::NonOrthonormalBasis { defect });
        }
        Ok(BasisSample { vectors, seed: 0 })
    }
}

/// `sum_i p(v_i)` over the basis.
pub fn frame_sum(p: &FrameFunction, b: &BasisSample) -> Result<f64> {
    if let Some(d) = p.dim() {
        if d != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: b.dim(),
            });
        }
    }
    Ok((0..b.dim()).map(|i| p.evaluate(&b.vectors.column(i))).sum())
}

/// Haar-random orthonormal basis drawn from `seed`.
pub fn random_basis(dim: usize, seed: u64) -> BasisSample {
    assert!(dim >= 1, "basis dimension must be positive");
    let mut r = rng(seed);
    BasisSample {
        vectors: haar_unitary(&mut r, dim),
        seed,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Consistent,
    Violated,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Consistent => "CONSISTENT",
            Verdict::Violated => "VIOLATED",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditReport {
    pub kind: alloc::string::String,
    pub dim: usize,
    pub trials: usize,
    pub max_dev: f64,
    pub mean_dev: f64,
    /// Seed of the basis with the largest deviation; replay it with
    /// [`random_basis`].
    pub worst_basis_seed: u64,
    pub verdict: Verdict,
}

/// Seed of trial `t` in an audit started from `seed`.
pub fn trial_seed(seed: u64, t: usize) -> u64 {
    seed.wrapping_add(t as u64)
}

/// Samples `trials` Haar bases (seeds `seed, seed + 1, ...`) and measures
/// `|frame_sum - 1|` on each.
pub fn audit(p: &FrameFunction, dim: usize, trials: usize, seed: u64) -> Result<AuditReport> {
    if dim < 3 {
        return Err(Error::DimensionTooSmall(dim));
    }
    if trials == 0 {
        return Err(Error::InvalidTransform("an audit needs at least one trial"));
    }
    if let Some(d) = p.dim() {
        if d != dim {
            return Err(Error::DimensionMismatch { expected: d, found: dim });
        }
    }
    let mut max_dev = f64::NEG_INFINITY;
    let mut worst = seed;
    let mut total = 0.0;
    for t in 0..trials {
        let s = trial_seed(seed, t);
        let dev = (frame_sum(p, &random_basis(dim, s))? - 1.0).abs();
        total += dev;
        if dev > max_dev {
            max_dev = dev;
            worst = s;
        }
    }
    Ok(AuditReport {
        kind: p.kind(),
        dim,
        trials,
        max_dev,
        mean_dev: total / trials as f64,
        worst_basis_seed: worst,
        verdict: if max_dev <= FRAME_TOL {
            Verdict::Consistent
        } else {
            Verdict::Violated
        },
    })
}

/// Random density matrix `G G^dagger / tr(G G^dagger)` for a Ginibre `G`.
pub fn random_density(dim: usize, seed: u64) -> CMatrix {
    let mut r = rng(seed);
    let g = crate::random::gaussian_matrix(&mut r, dim, dim);
    let rho = g.matmul(&g.adjoint());
    let tr = rho.trace().re;
    rho.scale(C64::new(1.0 / tr, 0.0))
}
