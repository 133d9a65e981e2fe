//! Electron integrals, model Hamiltonians and closed-shell reference quantities.
//!
//! Two-electron integrals use chemists' notation `(pq|rs)`. HF, orbital
//! energies and MP2 assume the integrals are already expressed in canonical
//! molecular orbitals with aufbau occupation.

mod fcidump;
mod hamiltonian;
mod reference;

use nalgebra::DMatrix;

pub use fcidump::{parse_fcidump, write_fcidump};
pub use hamiltonian::{build_fermion_hamiltonian, build_hubbard};
pub use reference::{active_space_reduce, hf_energy, mp2, orbital_energies, ActiveSpaceResult, Mp2Result};

use crate::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct IntegralSet {
    pub n_orb: usize,
    pub n_elec: usize,
    pub int1e: DMatrix<f64>,
    /// Row-major `n_orb⁴` array, element `(pq|rs)` at `((p·n + q)·n + r)·n + s`.
    pub int2e: Vec<f64>,
    pub e_core: f64,
}

impl IntegralSet {
    /// All-zero integrals for `n_orb` orbitals.
    pub fn zeros(n_orb: usize, n_elec: usize) -> Self {
        Self {
            n_orb,
            n_elec,
            int1e: DMatrix::zeros(n_orb, n_orb),
            int2e: vec![0.0; n_orb.pow(4)],
            e_core: 0.0,
        }
    }

    #[inline]
    pub fn idx(&self, p: usize, q: usize, r: usize, s: usize) -> usize {
        let n = self.n_orb;
        ((p * n + q) * n + r) * n + s
    }

    #[inline]
    pub fn eri(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.int2e[self.idx(p, q, r, s)]
    }

    /// Sets `(pq|rs)` and its seven permutational partners.
    pub fn set_eri(&mut self, p: usize, q: usize, r: usize, s: usize, v: f64) {
        for (a, b, c, d) in [
            (p, q, r, s),
            (q, p, r, s),
            (p, q, s, r),
            (q, p, s, r),
            (r, s, p, q),
            (s, r, p, q),
            (r, s, q, p),
            (s, r, q, p),
        ] {
            let i = self.idx(a, b, c, d);
            self.int2e[i] = v;
        }
    }

    pub fn n_occ(&self) -> usize {
        self.n_elec / 2
    }

    /// Checks the shape and symmetry invariants.
    pub fn validate(&self) -> Result<()> {
        let n = self.n_orb;
        if self.int1e.nrows() != n || self.int1e.ncols() != n || self.int2e.len() != n.pow(4) {
            return Err(Error::InvalidModel("integral array shapes do not match n_orb".into()));
        }
        if !self.n_elec.is_multiple_of(2) {
            return Err(Error::UnsupportedOpenShell(format!("{} electrons", self.n_elec)));
        }
        if self.n_elec > 2 * n {
            return Err(Error::InvalidModel(format!(
                "{} electrons do not fit in {} orbitals",
                self.n_elec, n
            )));
        }
        for p in 0..n {
            for q in 0..n {
                if (self.int1e[(p, q)] - self.int1e[(q, p)]).abs() > SYMMETRY_TOL {
                    return Err(Error::InvalidModel(format!("int1e not symmetric at ({p},{q})")));
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let v = self.eri(p, q, r, s);
                        let partners = [self.eri(q, p, r, s), self.eri(p, q, s, r), self.eri(r, s, p, q)];
                        if partners.iter().any(|w| (v - w).abs() > SYMMETRY_TOL) {
                            return Err(Error::InvalidModel(format!(
                                "int2e lacks 8-fold symmetry at ({p}{q}|{r}{s})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Transforms to a new orbital basis, `φ'_j = Σ_i c_ij φ_i`.
    pub fn rotate(&self, c: &DMatrix<f64>) -> Self {
        let n = self.n_orb;
        let int1e = c.transpose() * &self.int1e * c;
        // four quarter transformations, each contracting the leading index
        // and cycling it to the back
        let mut buf = self.int2e.clone();
        let n3 = n * n * n;
        for _ in 0..4 {
            let mut next = vec![0.0; n.pow(4)];
            for rest in 0..n3 {
                for j in 0..n {
                    let mut acc = 0.0;
                    for i in 0..n {
                        acc += c[(i, j)] * buf[i * n3 + rest];
                    }
                    next[rest * n + j] = acc;
                }
            }
            buf = next;
        }
        Self {
            n_orb: n,
            n_elec: self.n_elec,
            int1e,
            int2e: buf,
            e_core: self.e_core,
        }
    }

    /// Rotates into the eigenbasis of the one-electron matrix, eigenvalues
    /// ascending. For half-filled bipartite lattice models such as the
    /// Hubbard chain this basis is also the canonical RHF basis.
    pub fn to_core_eigenbasis(&self) -> Self {
        let eig = nalgebra::SymmetricEigen::new(self.int1e.clone());
        let mut order: Vec<usize> = (0..self.n_orb).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let mut c = DMatrix::zeros(self.n_orb, self.n_orb);
        for (j, &k) in order.iter().enumerate() {
            let col = eig.eigenvectors.column(k);
            // fix the sign so the largest component is positive
            let (imax, _) =
                col.iter().enumerate().fold(
                    (0, 0.0f64),
                    |best, (i, v)| if v.abs() > best.1 + 1e-12 { (i, v.abs()) } else { best },
                );
            let sign = if col[imax] < 0.0 { -1.0 } else { 1.0 };
            for i in 0..self.n_orb {
                c[(i, j)] = sign * col[i];
            }
        }
        self.rotate(&c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_eri_fills_partners() {
        let mut s = IntegralSet::zeros(3, 2);
        s.set_eri(0, 1, 2, 0, 0.25);
        assert_eq!(s.eri(1, 0, 0, 2), 0.25);
        assert_eq!(s.eri(2, 0, 1, 0), 0.25);
        s.validate().unwrap();
    }

    #[test]
    fn identity_rotation() {
        let mut s = IntegralSet::zeros(2, 2);
        s.int1e[(0, 1)] = -1.0;
        s.int1e[(1, 0)] = -1.0;
        s.set_eri(0, 0, 1, 1, 0.5);
        s.set_eri(0, 1, 0, 1, 0.1);
        let r = s.rotate(&DMatrix::identity(2, 2));
        assert_eq!(r, s);
    }

    #[test]
    fn rotation_preserves_trace_of_h() {
        let mut s = IntegralSet::zeros(3, 2);
        for p in 0..3 {
            for q in 0..3 {
                s.int1e[(p, q)] = 1.0 / (1.0 + (p + q) as f64);
            }
        }
        let r = s.to_core_eigenbasis();
        assert!((r.int1e.trace() - s.int1e.trace()).abs() < 1e-12);
        assert!(r.int1e[(0, 1)].abs() < 1e-12);
        assert!(r.int1e[(0, 0)] <= r.int1e[(1, 1)]);
    }
}
