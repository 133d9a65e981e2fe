//! Fermionic and qubit operator algebra and the fermion-to-qubit mappings.
//!
//! Qubit conventions: qubit `0` is the leftmost character of a bitstring and
//! the most significant bit of a dense basis index. Spin-orbital `i` of a
//! `n`-orbital system lives on qubit `n - 1 - i`, so bit `i` of a basis index
//! is the occupation of spin-orbital `i`. Occupied is `|1>`.

mod fermion;
mod mapping;
mod pauli;

pub use fermion::{FermionOperator, Ladder, LadderKind, LadderTerm};
pub use mapping::{jordan_wigner, parity_transform};
pub use pauli::{Pauli, PauliKey, PauliString, QubitOperator};

/// Coefficients below this magnitude are dropped by `simplify`.
pub const PRUNE_TOL: f64 = 1e-12;

/// Largest register for which [`QubitOperator::to_dense_matrix`] will allocate.
pub const DENSE_QUBIT_LIMIT: usize = 14;
