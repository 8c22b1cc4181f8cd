//! Numerical and symbolic machinery for checking the envariance route to
//! the Born rule.
//!
//! The crate is `no_std` (it needs `alloc`). Layers, bottom up:
//!
//! - [`linalg`]: dense complex matrices, Jacobi eigen/SVD solvers.
//! - [`state`]: bipartite and tripartite pure states, local unitaries.
//! - [`schmidt`]: Schmidt decomposition and its degeneracy structure.
//! - [`envariance`]: phase and swap transforms, the constructive envariance
//!   decision and its Procrustes oracle.
//! - [`derivation`]: symbolic probability terms and the rule-driven
//!   equality store that replays the swap/counterswap argument.
//! - [`finegrain`]: the counting argument for rational weights.
//! - [`gleason`]: frame-function audits over Haar-random bases.
#![no_std]

extern crate alloc;

pub mod derivation;
pub mod envariance;
pub mod error;
pub mod finegrain;
pub mod gleason;
pub mod linalg;
pub mod random;
pub mod schmidt;
pub mod state;

pub use error::{Error, Result};
pub use linalg::{CMatrix, C64};
pub use state::{BipartiteState, LocalUnitary, TripartiteState};
