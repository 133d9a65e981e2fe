use indexmap::IndexMap;
use nalgebra::DMatrix;

use crate::civector::{CiModel, Excitation, ExcitationMap};
use crate::integrals::IntegralSet;
use crate::linalg::binomial;
use crate::operator::{Pauli, QubitOperator};
use crate::{Complex64, Error, Result};

/// Seniority-zero Hamiltonian on hard-core bosons, one per spatial orbital:
/// `Σ_p h_p n_p + Σ_pq v_pq b†_p b_q + Σ_{p≠q} w_pq n_p n_q + e_core`
/// with `h_p = 2h_pp`, `v_pq = (pq|pq)` and `w_pq = 2(pp|qq) − (pq|pq)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedHamiltonian {
    pub n_orb: usize,
    pub n_pairs: usize,
    pub h: Vec<f64>,
    pub v: DMatrix<f64>,
    pub w: DMatrix<f64>,
    pub e_core: f64,
}

pub fn build_puccd_hamiltonian(s: &IntegralSet) -> PairedHamiltonian {
    let n = s.n_orb;
    PairedHamiltonian {
        n_orb: n,
        n_pairs: s.n_elec / 2,
        h: (0..n).map(|p| 2.0 * s.int1e[(p, p)]).collect(),
        v: DMatrix::from_fn(n, n, |p, q| s.eri(p, q, p, q)),
        w: DMatrix::from_fn(n, n, |p, q| {
            if p == q {
                0.0
            } else {
                2.0 * s.eri(p, p, q, q) - s.eri(p, q, p, q)
            }
        }),
        e_core: s.e_core,
    }
}

impl PairedHamiltonian {
    /// Qubit form; orbital `p` sits on qubit `n − 1 − p` and `|1⟩` is an occupied pair.
    pub fn to_qubit_operator(&self) -> Result<QubitOperator> {
        let n = self.n_orb;
        let qb = |p: usize| n - 1 - p;
        let c = |x: f64| Complex64::new(x, 0.0);
        let mut terms: IndexMap<Vec<(usize, Pauli)>, f64> = IndexMap::new();
        let mut add = |letters: Vec<(usize, Pauli)>, x: f64| *terms.entry(letters).or_insert(0.0) += x;
        add(vec![], self.e_core);
        for p in 0..n {
            // n_p = (1 − Z)/2
            let diag = self.h[p] + self.v[(p, p)];
            add(vec![], 0.5 * diag);
            add(vec![(qb(p), Pauli::Z)], -0.5 * diag);
            for q in 0..n {
                if p == q {
                    continue;
                }
                let w = self.w[(p, q)];
                add(vec![], 0.25 * w);
                add(vec![(qb(p), Pauli::Z)], -0.25 * w);
                add(vec![(qb(q), Pauli::Z)], -0.25 * w);
                let mut zz = vec![(qb(p), Pauli::Z), (qb(q), Pauli::Z)];
                zz.sort_by_key(|l| l.0);
                add(zz, 0.25 * w);
                if p < q {
                    // v(b†_p b_q + b†_q b_p) = v/2 (XX + YY)
                    let v = self.v[(p, q)];
                    let mut xx = vec![(qb(p), Pauli::X), (qb(q), Pauli::X)];
                    let mut yy = vec![(qb(p), Pauli::Y), (qb(q), Pauli::Y)];
                    xx.sort_by_key(|l| l.0);
                    yy.sort_by_key(|l| l.0);
                    add(xx, 0.5 * v);
                    add(yy, 0.5 * v);
                }
            }
        }
        let mut op = QubitOperator::new(n)?;
        for (letters, x) in terms {
            op = op.add(&QubitOperator::single(n, &letters, c(x))?)?;
        }
        Ok(op.simplify())
    }
}

/// Hard-core-boson space: strings of `n_pairs` occupied spatial orbitals in
/// ascending order.
#[derive(Debug, Clone)]
pub struct PairedModel {
    pub hamiltonian: PairedHamiltonian,
    strings: Vec<u64>,
    binom: Vec<Vec<u64>>,
}

impl PairedModel {
    pub fn new(s: &IntegralSet) -> Result<Self> {
        if !s.n_elec.is_multiple_of(2) {
            return Err(Error::UnsupportedOpenShell(format!("{} electrons", s.n_elec)));
        }
        if s.n_orb > 30 {
            return Err(Error::SizeLimit(format!("{} orbitals in the paired space", s.n_orb)));
        }
        let hamiltonian = build_puccd_hamiltonian(s);
        let n = hamiltonian.n_orb;
        let k = hamiltonian.n_pairs;
        let strings: Vec<u64> = (0u64..1 << n).filter(|m| m.count_ones() as usize == k).collect();
        let binom = (0..=n)
            .map(|a| (0..=n.max(1)).map(|b| binomial(a, b)).collect())
            .collect();
        Ok(Self {
            hamiltonian,
            strings,
            binom,
        })
    }

    pub fn strings(&self) -> &[u64] {
        &self.strings
    }

    pub fn index_of(&self, s: u64) -> usize {
        let mut rank = 0;
        let mut rest = s;
        let mut k = 1;
        while rest != 0 {
            rank += self.binom[rest.trailing_zeros() as usize][k];
            rest &= rest - 1;
            k += 1;
        }
        rank as usize
    }

    fn diag(&self, s: u64) -> f64 {
        let h = &self.hamiltonian;
        let occ: Vec<usize> = (0..h.n_orb).filter(|&p| s >> p & 1 == 1).collect();
        let mut e = h.e_core;
        for &p in &occ {
            e += h.h[p] + h.v[(p, p)];
            for &q in &occ {
                if p != q {
                    e += h.w[(p, q)];
                }
            }
        }
        e
    }

    /// Ground state by dense diagonalization of the paired Hamiltonian.
    pub fn ground_state(&self) -> Result<(f64, Vec<f64>)> {
        let dim = self.strings.len();
        if dim > 4000 {
            return Err(Error::SizeLimit(format!("paired space of dimension {dim}")));
        }
        let mut m = DMatrix::zeros(dim, dim);
        for j in 0..dim {
            let mut e = vec![0.0; dim];
            e[j] = 1.0;
            for (i, x) in self.apply_hamiltonian(&e).into_iter().enumerate() {
                m[(i, j)] = x;
            }
        }
        let eig = nalgebra::SymmetricEigen::new(m);
        let k = eig.eigenvalues.argmin().0;
        Ok((eig.eigenvalues[k], eig.eigenvectors.column(k).iter().copied().collect()))
    }
}

impl CiModel for PairedModel {
    fn dim(&self) -> usize {
        self.strings.len()
    }

    fn excitation_map(&self, ex: &Excitation) -> Result<ExcitationMap> {
        let n = self.hamiltonian.n_orb;
        let t = ex.indices();
        let paired = t.len() == 4 && t[0] == t[1] + n && t[3] == t[2] + n && t[1] < n && t[2] < n && t[1] != t[2];
        if !paired {
            return Err(Error::InvalidExcitation(format!(
                "{ex} is not a paired double (p+N, p, q, q+N)"
            )));
        }
        let (a, i) = (t[1], t[2]);
        let pairs = self
            .strings
            .iter()
            .enumerate()
            .filter(|(_, &s)| s >> i & 1 == 1 && s >> a & 1 == 0)
            .map(|(k, &s)| (k, self.index_of(s ^ (1 << i) ^ (1 << a)), 1.0))
            .collect();
        Ok(ExcitationMap::from_pairs(pairs))
    }

    fn apply_hamiltonian(&self, v: &[f64]) -> Vec<f64> {
        let h = &self.hamiltonian;
        let n = h.n_orb;
        let mut out = vec![0.0; v.len()];
        for (k, &s) in self.strings.iter().enumerate() {
            let mut acc = self.diag(s) * v[k];
            for q in (0..n).filter(|&q| s >> q & 1 == 1) {
                for p in (0..n).filter(|&p| s >> p & 1 == 0) {
                    let c = h.v[(p, q)];
                    if c != 0.0 {
                        acc += c * v[self.index_of(s ^ (1 << q) ^ (1 << p))];
                    }
                }
            }
            out[k] = acc;
        }
        out
    }

    fn reference_state(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.strings.len()];
        v[self.index_of((1u64 << self.hamiltonian.n_pairs) - 1)] = 1.0;
        v
    }
}
