use std::sync::OnceLock;

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::engine::{CiModel, ExcitationMap};
use super::space::{annihilate, create, CISpace, Determinant, Excitation};
use crate::integrals::IntegralSet;
use crate::{Error, Result};

const TERM_CUTOFF: f64 = 1e-12;
/// Rows are cached as a sparse matrix below this dimension.
const SPARSE_CACHE_DIM: usize = 50_000;

#[derive(Debug, Default)]
struct Csr {
    offsets: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

/// Ab initio Hamiltonian acting on a closed-shell determinant space.
#[derive(Debug)]
pub struct CIHamiltonian {
    pub space: CISpace,
    pub integrals: IntegralSet,
    csr: OnceLock<Csr>,
}

impl CIHamiltonian {
    pub fn new(space: CISpace, integrals: IntegralSet) -> Result<Self> {
        if space.n_orb != integrals.n_orb {
            return Err(Error::InvalidModel(format!(
                "space has {} orbitals, integrals {}",
                space.n_orb, integrals.n_orb
            )));
        }
        Ok(Self {
            space,
            integrals,
            csr: OnceLock::new(),
        })
    }

    /// Builds the space from the integrals' own orbital and electron counts.
    pub fn from_integrals(integrals: &IntegralSet) -> Result<Self> {
        Self::new(CISpace::new(integrals.n_orb, integrals.n_elec)?, integrals.clone())
    }

    #[inline]
    fn h1(&self, p: usize, q: usize) -> f64 {
        let n = self.space.n_orb;
        if p / n != q / n {
            0.0
        } else {
            self.integrals.int1e[(p % n, q % n)]
        }
    }

    /// Coefficient of `a†_P a†_Q a_R a_S` (`P < Q`, `R < S`) in the spin-orbital Hamiltonian.
    #[inline]
    fn h2(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.space.n_orb;
        let spin = |i: usize| i / n;
        let mut v = 0.0;
        if spin(p) == spin(s) && spin(q) == spin(r) {
            v += self.integrals.eri(p % n, s % n, q % n, r % n);
        }
        if spin(p) == spin(r) && spin(q) == spin(s) {
            v -= self.integrals.eri(p % n, r % n, q % n, s % n);
        }
        v
    }

    /// Calls `f(det', ⟨det'|H|det⟩)` for every determinant connected to `det`,
    /// the core energy included on the diagonal. A determinant may be visited
    /// more than once.
    pub fn for_each_connected(&self, det: Determinant, mut f: impl FnMut(Determinant, f64)) {
        let ns = self.space.n_spin_orbitals();
        let n = self.space.n_orb;
        let occ: Vec<usize> = (0..ns).filter(|&i| det >> i & 1 == 1).collect();

        f(det, self.integrals.e_core);
        for &q in &occ {
            let (d1, s1) = annihilate(det, q).unwrap();
            let sector = (q / n) * n;
            for p in sector..sector + n {
                let h = self.h1(p, q);
                if h.abs() <= TERM_CUTOFF {
                    continue;
                }
                if let Some((d2, s2)) = create(d1, p) {
                    f(d2, if s1 ^ s2 { -h } else { h });
                }
            }
        }
        for (i, &r) in occ.iter().enumerate() {
            for &s in &occ[i + 1..] {
                // a_R a_S: S acts first
                let (d1, s1) = annihilate(det, s).unwrap();
                let (d2, s2) = annihilate(d1, r).unwrap();
                let n_alpha = (r >= n) as usize + (s >= n) as usize;
                for p in 0..ns {
                    if d2 >> p & 1 == 1 {
                        continue;
                    }
                    for q in p + 1..ns {
                        if d2 >> q & 1 == 1 || (p >= n) as usize + (q >= n) as usize != n_alpha {
                            continue;
                        }
                        let v = self.h2(p, q, r, s);
                        if v.abs() <= TERM_CUTOFF {
                            continue;
                        }
                        let (d3, s3) = create(d2, q).unwrap();
                        let (d4, s4) = create(d3, p).unwrap();
                        f(d4, if s1 ^ s2 ^ s3 ^ s4 { -v } else { v });
                    }
                }
            }
        }
    }

    fn row(&self, i: usize) -> Vec<(u32, f64)> {
        let mut row: Vec<(u32, f64)> = Vec::new();
        self.for_each_connected(self.space.det(i), |d, c| {
            row.push((self.space.index_of(d) as u32, c));
        });
        row.sort_unstable_by_key(|&(j, _)| j);
        let mut merged: Vec<(u32, f64)> = Vec::with_capacity(row.len());
        for (j, c) in row {
            match merged.last_mut() {
                Some(last) if last.0 == j => last.1 += c,
                _ => merged.push((j, c)),
            }
        }
        merged.retain(|&(_, c)| c != 0.0);
        merged
    }

    fn csr(&self) -> Option<&Csr> {
        if self.space.dim() > SPARSE_CACHE_DIM {
            return None;
        }
        Some(self.csr.get_or_init(|| {
            let rows: Vec<Vec<(u32, f64)>> = (0..self.space.dim()).into_par_iter().map(|i| self.row(i)).collect();
            let mut csr = Csr::default();
            csr.offsets.push(0);
            for r in rows {
                for (j, c) in r {
                    csr.cols.push(j);
                    csr.vals.push(c);
                }
                csr.offsets.push(csr.cols.len());
            }
            csr
        }))
    }

    /// `H v` including the core energy.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let dim = self.space.dim();
        assert_eq!(v.len(), dim, "vector length does not match the CI space");
        let mut out = vec![0.0; dim];
        if let Some(csr) = self.csr() {
            out.par_iter_mut().enumerate().for_each(|(i, o)| {
                let (a, b) = (csr.offsets[i], csr.offsets[i + 1]);
                *o = csr.cols[a..b]
                    .iter()
                    .zip(&csr.vals[a..b])
                    .map(|(&j, &c)| c * v[j as usize])
                    .sum();
            });
        } else {
            // H is real symmetric, so row i of H v gathers the couplings of det i
            out.par_iter_mut().enumerate().for_each(|(i, o)| {
                let mut acc = 0.0;
                self.for_each_connected(self.space.det(i), |d, c| {
                    acc += c * v[self.space.index_of(d)];
                });
                *o = acc;
            });
        }
        out
    }

    /// Diagonal elements `⟨D|H|D⟩`.
    pub fn diagonal(&self) -> Vec<f64> {
        let ns = self.space.n_spin_orbitals();
        let n = self.space.n_orb;
        (0..self.space.dim())
            .into_par_iter()
            .map(|i| {
                let det = self.space.det(i);
                let occ: Vec<usize> = (0..ns).filter(|&k| det >> k & 1 == 1).collect();
                let mut e = self.integrals.e_core;
                for (a, &p) in occ.iter().enumerate() {
                    e += self.integrals.int1e[(p % n, p % n)];
                    for &q in &occ[a + 1..] {
                        e += self.integrals.eri(p % n, p % n, q % n, q % n);
                        if p / n == q / n {
                            e -= self.integrals.eri(p % n, q % n, q % n, p % n);
                        }
                    }
                }
                e
            })
            .collect()
    }

    pub fn dense(&self) -> Result<DMatrix<f64>> {
        let dim = self.space.dim();
        if dim > 8000 {
            return Err(Error::SizeLimit(format!("dense CI matrix of dimension {dim}")));
        }
        let mut m = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for (j, c) in self.row(i) {
                m[(j as usize, i)] += c;
            }
        }
        Ok(m)
    }
}

impl CiModel for CIHamiltonian {
    fn dim(&self) -> usize {
        self.space.dim()
    }

    fn excitation_map(&self, ex: &Excitation) -> Result<ExcitationMap> {
        self.space.excitation_map(ex)
    }

    fn apply_hamiltonian(&self, v: &[f64]) -> Vec<f64> {
        self.apply(v)
    }

    fn reference_state(&self) -> Vec<f64> {
        self.space.hf_vector()
    }
}

impl CISpace {
    pub fn excitation_map(&self, ex: &Excitation) -> Result<ExcitationMap> {
        ex.validate(self.n_orb)?;
        let pairs: Vec<(usize, usize, f64)> = (0..self.dim())
            .into_par_iter()
            .filter_map(|i| {
                ex.act(self.det(i))
                    .map(|(d, neg)| (i, self.index_of(d), if neg { -1.0 } else { 1.0 }))
            })
            .collect();
        Ok(ExcitationMap::from_pairs(pairs))
    }
}
