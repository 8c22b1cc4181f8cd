use thiserror::Error;

/// Every failure the core can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("ZeroState: all amplitudes are zero")]
    ZeroState,
    #[error("NotNormalized: squared norm is {norm_sqr}, expected 1")]
    NotNormalized { norm_sqr: f64 },
    #[error("NonFinite: amplitudes must be finite")]
    NonFinite,
    #[error("DimensionMismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("EmptyDimension: every factor needs dimension at least 1")]
    EmptyDimension,
    #[error("NotUnitary: max deviation of U^dagger U from I is {defect:e}")]
    NotUnitary { defect: f64 },
    #[error("NonOrthonormalBasis: max deviation of the Gram matrix from I is {defect:e}")]
    NonOrthonormalBasis { defect: f64 },
    #[error("IndexOutOfRange: index {index} with {len} basis vectors")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("InvalidTransform: {0}")]
    InvalidTransform(&'static str),
    #[error("UnevenCoefficients: swapped branches {i} and {j} have coefficients {lambda_i} and {lambda_j}")]
    UnevenCoefficients {
        i: usize,
        j: usize,
        lambda_i: f64,
        lambda_j: f64,
    },
    #[error("UnknownTerm: the term is not present in the store")]
    UnknownTerm,
    #[error("IncompleteDerivation: branch probabilities were not all derived equal")]
    IncompleteDerivation,
    #[error("NormalizationDisabled: numeric probabilities need the normalization rule")]
    NormalizationDisabled,
    #[error("NoRationalFit: no common denominator up to {max_den} fits within {tol:e}")]
    NoRationalFit { max_den: u64, tol: f64 },
    #[error("InvalidWeights: {0}")]
    InvalidWeights(&'static str),
    #[error("WeightMismatch: {0}")]
    WeightMismatch(&'static str),
    #[error("DimensionTooSmall: frame-function audits need dimension greater than two (got {0})")]
    DimensionTooSmall(usize),
    #[error("InvalidDensity: {0}")]
    InvalidDensity(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
