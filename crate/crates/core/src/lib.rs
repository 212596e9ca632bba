//! Operator ordering sensitivity and nonclassicality witnesses for
//! single-mode bosonic states in a truncated Fock space.
//!
//! The central object is [`DensityMatrix`]. From it the crate computes
//!
//! - the ordering sensitivity `S_o` by several independent routes
//!   (commutators, the K-matrix over the eigenbasis, characteristic-function
//!   quadrature, finite differences on a Wigner grid),
//! - the bounds it induces on the distance to the classical states,
//! - s-ordered quasiprobabilities and their Renyi-2 entropy,
//! - moment determinants, Mandel and squeezing witnesses, and the quantum
//!   Fisher information macroscopicity,
//! - the effect of a thermal beam-splitter bath on all of the above.

pub mod channels;
pub mod displacement;
pub mod error;
pub mod fock;
pub mod ordsens;
pub mod quasiprob;
pub mod report;
pub mod statespec;
pub mod witnesses;

pub use error::{Error, Result};
pub use fock::{
    build_ladder, cat_state, coherent_state, fock_state, mix, purity, spectral, squeezed_state,
    thermal_state, DensityMatrix, MixComponent, OperatorSet, SpectralDecomposition, StateVector,
};
pub use num_complex::Complex64;
