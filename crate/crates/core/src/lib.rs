//! Simulation toolkit for variational quantum chemistry.
//!
//! The centerpiece is [`civector`], which evaluates disentangled unitary
//! coupled-cluster states directly in the particle-number-conserving
//! determinant space by expanding every factor as
//! `exp(θG) = 1 + sin θ G + (1 - cos θ) G²`. Around it sit the operator
//! algebra and fermion-to-qubit mappings ([`operator`]), integral handling
//! ([`integrals`]), ansatz construction ([`ansatz`]), optimization and
//! reporting ([`vqe`]), a gate-level noisy simulator ([`gates`]) and
//! variational quantum dynamics ([`dynamics`]).

pub mod ansatz;
pub mod civector;
pub mod dynamics;
pub mod error;
pub mod gates;
pub mod integrals;
mod linalg;
pub mod operator;
pub mod optimize;
pub mod vqe;

pub use error::{Error, Result};

pub use num_complex::Complex64;
