//! UCC simulation directly in the configuration-interaction space.
//!
//! Every UCC factor is expanded as `e^{θG} = 1 + sin θ·G + (1 − cos θ)·G²`,
//! valid because `G³ = −G` for a fermionic excitation `G = g − g†`. Vectors
//! are real and indexed `ia·n_beta_strings + ib`; fermionic signs follow the
//! Jordan–Wigner convention, so [`civector_to_statevector`] is a plain
//! embedding.

mod engine;
mod fci;
mod hamiltonian;
mod rdm;
mod space;

use std::io::{Read, Write};

use num_complex::Complex64;

pub use engine::{factor_expansion, model_energy, CiModel, ExcitationMap, UccCircuit};
pub use fci::davidson;
pub use hamiltonian::CIHamiltonian;
pub use rdm::{make_rdm1, make_rdm2};
pub use space::{annihilate, ci_space_dim, create, CISpace, Determinant, Excitation};

use crate::integrals::IntegralSet;
use crate::{Error, Result};

/// Largest register that [`civector_to_statevector`] will allocate.
pub const STATEVECTOR_QUBIT_LIMIT: usize = 24;

pub fn make_ci_space(n_orb: usize, n_elec: usize) -> Result<CISpace> {
    CISpace::new(n_orb, n_elec)
}

pub fn hf_vector(space: &CISpace) -> Vec<f64> {
    space.hf_vector()
}

/// `G v` for the unitary excitation generator.
pub fn apply_excitation(space: &CISpace, v: &[f64], ex: &Excitation) -> Result<Vec<f64>> {
    check_len(space, v)?;
    Ok(space.excitation_map(ex)?.apply(v))
}

/// `e^{θG} v` by the three-term expansion.
pub fn apply_ucc_factor(space: &CISpace, v: &[f64], ex: &Excitation, theta: f64) -> Result<Vec<f64>> {
    check_len(space, v)?;
    Ok(factor_expansion(&space.excitation_map(ex)?, v, theta))
}

pub fn apply_hamiltonian(space: &CISpace, v: &[f64], s: &IntegralSet) -> Result<Vec<f64>> {
    check_len(space, v)?;
    Ok(CIHamiltonian::new(space.clone(), s.clone())?.apply(v))
}

pub fn energy(space: &CISpace, v: &[f64], s: &IntegralSet) -> Result<f64> {
    check_len(space, v)?;
    model_energy(&CIHamiltonian::new(space.clone(), s.clone())?, v)
}

pub fn ucc_state(
    space: &CISpace,
    ex_ops: &[Excitation],
    params: &[f64],
    param_ids: &[usize],
    initial: &[f64],
) -> Result<Vec<f64>> {
    check_len(space, initial)?;
    UccCircuit::new(space, ex_ops, param_ids)?.state(params, initial)
}

/// Energy and gradient of the UCC state built on the HF determinant.
pub fn energy_and_gradient(
    space: &CISpace,
    ex_ops: &[Excitation],
    params: &[f64],
    param_ids: &[usize],
    s: &IntegralSet,
) -> Result<(f64, Vec<f64>)> {
    let h = CIHamiltonian::new(space.clone(), s.clone())?;
    let circuit = UccCircuit::new(&h, ex_ops, param_ids)?;
    circuit.energy_and_gradient(&h, params, &space.hf_vector())
}

pub fn fci_ground_state(space: &CISpace, s: &IntegralSet) -> Result<(f64, Vec<f64>)> {
    fci::fci_ground_state(&CIHamiltonian::new(space.clone(), s.clone())?)
}

/// Embeds the CI vector into the `2^{2N}` qubit register; the basis index of
/// a determinant is its occupation bitmask.
pub fn civector_to_statevector(space: &CISpace, v: &[f64]) -> Result<Vec<Complex64>> {
    check_len(space, v)?;
    let n = space.n_spin_orbitals();
    if n > STATEVECTOR_QUBIT_LIMIT {
        return Err(Error::SizeLimit(format!(
            "{n} qubits exceeds {STATEVECTOR_QUBIT_LIMIT}"
        )));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); 1 << n];
    for (i, &c) in v.iter().enumerate() {
        out[space.det(i) as usize] = Complex64::new(c, 0.0);
    }
    Ok(out)
}

/// Inverse of [`civector_to_statevector`]; amplitude outside the space is dropped.
pub fn statevector_to_civector(space: &CISpace, psi: &[Complex64]) -> Result<Vec<f64>> {
    if psi.len() != 1usize << space.n_spin_orbitals() {
        return Err(Error::InvalidParams(format!("statevector length {}", psi.len())));
    }
    Ok((0..space.dim()).map(|i| psi[space.det(i) as usize].re).collect())
}

fn check_len(space: &CISpace, v: &[f64]) -> Result<()> {
    if v.len() != space.dim() {
        return Err(Error::InvalidParams(format!(
            "vector length {} does not match CI dimension {}",
            v.len(),
            space.dim()
        )));
    }
    Ok(())
}

impl CiModel for CISpace {
    fn dim(&self) -> usize {
        CISpace::dim(self)
    }

    fn excitation_map(&self, ex: &Excitation) -> Result<ExcitationMap> {
        CISpace::excitation_map(self, ex)
    }

    /// A bare space carries no Hamiltonian; this is the identity.
    fn apply_hamiltonian(&self, v: &[f64]) -> Vec<f64> {
        v.to_vec()
    }

    fn reference_state(&self) -> Vec<f64> {
        self.hf_vector()
    }
}

/// CI amplitudes with the shape of the space they live in, for persistence.
#[derive(Debug, Clone, PartialEq)]
pub struct CIVector {
    pub n_orb: usize,
    pub n_alpha: usize,
    pub n_beta: usize,
    pub amplitudes: Vec<f64>,
}

impl CIVector {
    pub fn new(space: &CISpace, amplitudes: Vec<f64>) -> Result<Self> {
        check_len(space, &amplitudes)?;
        Ok(Self {
            n_orb: space.n_orb,
            n_alpha: space.n_alpha,
            n_beta: space.n_beta,
            amplitudes,
        })
    }

    /// Header of three little-endian `u64` (n_orb, n_alpha, n_beta), then the amplitudes as `f64`.
    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        for x in [self.n_orb, self.n_alpha, self.n_beta] {
            w.write_all(&(x as u64).to_le_bytes())?;
        }
        for a in &self.amplitudes {
            w.write_all(&a.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut buf = [0u8; 8];
        let mut header = [0usize; 3];
        for h in header.iter_mut() {
            r.read_exact(&mut buf)?;
            *h = u64::from_le_bytes(buf) as usize;
        }
        let [n_orb, n_alpha, n_beta] = header;
        if n_alpha != n_beta || n_alpha > n_orb || n_orb > 64 {
            return Err(Error::Parse {
                line: 0,
                msg: format!("bad state header ({n_orb}, {n_alpha}, {n_beta})"),
            });
        }
        let space = CISpace::new(n_orb, n_alpha + n_beta)?;
        let mut amplitudes = Vec::with_capacity(space.dim());
        for _ in 0..space.dim() {
            r.read_exact(&mut buf)?;
            amplitudes.push(f64::from_le_bytes(buf));
        }
        Ok(Self {
            n_orb,
            n_alpha,
            n_beta,
            amplitudes,
        })
    }
}
