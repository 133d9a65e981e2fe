use nalgebra::{DMatrix, DVector};

use super::IntegralSet;
use crate::{Error, Result};

const DEGENERACY_TOL: f64 = 1e-10;

/// Closed-shell determinant energy with the lowest `n_elec / 2` orbitals doubly occupied.
pub fn hf_energy(s: &IntegralSet) -> f64 {
    let occ = s.n_occ();
    let mut e = s.e_core;
    for i in 0..occ {
        e += 2.0 * s.int1e[(i, i)];
        for j in 0..occ {
            e += 2.0 * s.eri(i, i, j, j) - s.eri(i, j, j, i);
        }
    }
    e
}

/// Diagonal of the closed-shell Fock matrix.
pub fn orbital_energies(s: &IntegralSet) -> DVector<f64> {
    let occ = s.n_occ();
    DVector::from_fn(s.n_orb, |p, _| {
        let mut e = s.int1e[(p, p)];
        for i in 0..occ {
            e += 2.0 * s.eri(p, p, i, i) - s.eri(p, i, i, p);
        }
        e
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mp2Result {
    pub n_occ: usize,
    pub n_virt: usize,
    /// Amplitudes `t2[i,j,a,b]`, row-major over `(n_occ, n_occ, n_virt, n_virt)`.
    pub t2: Vec<f64>,
    pub e_corr: f64,
    pub orbital_energies: DVector<f64>,
}

impl Mp2Result {
    pub fn t2(&self, i: usize, j: usize, a: usize, b: usize) -> f64 {
        let (no, nv) = (self.n_occ, self.n_virt);
        self.t2[((i * no + j) * nv + a) * nv + b]
    }
}

/// Second-order Møller–Plesset amplitudes and correlation energy.
pub fn mp2(s: &IntegralSet) -> Result<Mp2Result> {
    let eps = orbital_energies(s);
    let no = s.n_occ();
    let nv = s.n_orb - no;
    let mut t2 = vec![0.0; no * no * nv * nv];
    let mut e_corr = 0.0;
    for i in 0..no {
        for j in 0..no {
            for a in 0..nv {
                for b in 0..nv {
                    let (va, vb) = (no + a, no + b);
                    let iajb = s.eri(i, va, j, vb);
                    let ibja = s.eri(i, vb, j, va);
                    let denom = eps[i] + eps[j] - eps[va] - eps[vb];
                    if denom.abs() <= DEGENERACY_TOL {
                        if iajb.abs() <= DEGENERACY_TOL && ibja.abs() <= DEGENERACY_TOL {
                            continue;
                        }
                        return Err(Error::DegenerateOrbitals(format!(
                            "denominator {denom:e} for i={i} j={j} a={va} b={vb}"
                        )));
                    }
                    t2[((i * no + j) * nv + a) * nv + b] = iajb / denom;
                    e_corr += iajb * (2.0 * iajb - ibja) / denom;
                }
            }
        }
    }
    Ok(Mp2Result {
        n_occ: no,
        n_virt: nv,
        t2,
        e_corr,
        orbital_energies: eps,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActiveSpaceResult {
    pub reduced: IntegralSet,
    pub frozen_orbitals: Vec<usize>,
    pub v_eff: DMatrix<f64>,
}

/// Freezes the lowest doubly occupied orbitals and keeps the next `n_active_orb`.
pub fn active_space_reduce(s: &IntegralSet, n_active_elec: usize, n_active_orb: usize) -> Result<ActiveSpaceResult> {
    if n_active_elec > s.n_elec || !(s.n_elec - n_active_elec).is_multiple_of(2) {
        return Err(Error::InvalidActiveSpace(format!(
            "cannot take {n_active_elec} active electrons out of {}",
            s.n_elec
        )));
    }
    if !n_active_elec.is_multiple_of(2) {
        return Err(Error::UnsupportedOpenShell(format!("{n_active_elec} active electrons")));
    }
    let n_frozen = (s.n_elec - n_active_elec) / 2;
    if n_frozen + n_active_orb > s.n_orb {
        return Err(Error::InvalidActiveSpace(format!(
            "{n_frozen} frozen + {n_active_orb} active orbitals exceed {}",
            s.n_orb
        )));
    }
    if n_active_elec > 2 * n_active_orb {
        return Err(Error::InvalidActiveSpace(format!(
            "{n_active_elec} electrons do not fit in {n_active_orb} orbitals"
        )));
    }
    let frozen: Vec<usize> = (0..n_frozen).collect();
    let window = n_frozen..n_frozen + n_active_orb;

    let mut e_core = s.e_core;
    for &m in &frozen {
        e_core += 2.0 * s.int1e[(m, m)];
        for &k in &frozen {
            e_core += 2.0 * s.eri(m, m, k, k) - s.eri(m, k, k, m);
        }
    }

    let na = n_active_orb;
    let v_eff = DMatrix::from_fn(na, na, |p, q| {
        let (p, q) = (p + n_frozen, q + n_frozen);
        frozen
            .iter()
            .map(|&m| 2.0 * s.eri(m, m, p, q) - s.eri(m, p, q, m))
            .sum()
    });

    let mut reduced = IntegralSet::zeros(na, n_active_elec);
    reduced.e_core = e_core;
    for (p, pp) in window.clone().enumerate() {
        for (q, qq) in window.clone().enumerate() {
            reduced.int1e[(p, q)] = s.int1e[(pp, qq)] + v_eff[(p, q)];
            for (r, rr) in window.clone().enumerate() {
                for (t, tt) in window.clone().enumerate() {
                    let i = reduced.idx(p, q, r, t);
                    reduced.int2e[i] = s.eri(pp, qq, rr, tt);
                }
            }
        }
    }
    Ok(ActiveSpaceResult {
        reduced,
        frozen_orbitals: frozen,
        v_eff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> IntegralSet {
        let mut s = IntegralSet::zeros(3, 4);
        let h = [[-2.0, 0.1, 0.05], [0.1, -1.0, 0.2], [0.05, 0.2, 0.5]];
        for (p, row) in h.iter().enumerate() {
            for (q, &x) in row.iter().enumerate() {
                s.int1e[(p, q)] = x;
            }
        }
        s.set_eri(0, 0, 0, 0, 0.8);
        s.set_eri(1, 1, 1, 1, 0.7);
        s.set_eri(2, 2, 2, 2, 0.6);
        s.set_eri(0, 0, 1, 1, 0.5);
        s.set_eri(0, 1, 0, 1, 0.1);
        s.set_eri(1, 1, 2, 2, 0.4);
        s.set_eri(1, 2, 1, 2, 0.08);
        s.set_eri(0, 0, 2, 2, 0.45);
        s.set_eri(0, 2, 0, 2, 0.05);
        s.e_core = 0.3;
        s
    }

    #[test]
    fn zero_two_electron_hf() {
        let mut s = IntegralSet::zeros(3, 4);
        s.int1e[(0, 0)] = -1.0;
        s.int1e[(1, 1)] = -0.5;
        s.int1e[(2, 2)] = 2.0;
        s.e_core = 0.25;
        assert!((hf_energy(&s) - (2.0 * -1.5 + 0.25)).abs() < 1e-15);
        assert_eq!(orbital_energies(&s).as_slice(), &[-1.0, -0.5, 2.0]);
        let m = mp2(&s).unwrap();
        assert_eq!(m.e_corr, 0.0);
        assert!(m.t2.iter().all(|&t| t == 0.0));
    }

    #[test]
    fn full_window_is_identity() {
        let s = toy();
        let r = active_space_reduce(&s, 4, 3).unwrap();
        assert!(r.frozen_orbitals.is_empty());
        assert_eq!(r.reduced, s);
    }

    #[test]
    fn freezing_everything_gives_hf() {
        let s = toy();
        let r = active_space_reduce(&s, 0, 1).unwrap();
        assert_eq!(r.frozen_orbitals, vec![0, 1]);
        assert!((r.reduced.e_core - hf_energy(&s)).abs() < 1e-12);
        // hf energy of the reduced problem is unchanged by freezing
        let r2 = active_space_reduce(&s, 2, 2).unwrap();
        assert!((hf_energy(&r2.reduced) - hf_energy(&s)).abs() < 1e-12);
    }

    #[test]
    fn window_too_large() {
        assert!(matches!(
            active_space_reduce(&toy(), 2, 3),
            Err(Error::InvalidActiveSpace(_))
        ));
    }

    #[test]
    fn degenerate_gap() {
        let mut s = IntegralSet::zeros(2, 2);
        s.set_eri(0, 1, 0, 1, 0.2);
        s.set_eri(0, 0, 1, 1, 0.1);
        assert!(matches!(mp2(&s), Err(Error::DegenerateOrbitals(_))));
    }
}
