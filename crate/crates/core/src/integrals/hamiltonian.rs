use super::IntegralSet;
use crate::operator::{FermionOperator, Ladder};
use crate::{Error, Result};

const TERM_CUTOFF: f64 = 1e-12;

/// One-dimensional Hubbard chain at half filling in the site basis.
pub fn build_hubbard(n_sites: usize, t: f64, u: f64, periodic: bool) -> Result<IntegralSet> {
    if n_sites < 2 {
        return Err(Error::InvalidModel(format!(
            "Hubbard chain needs at least 2 sites, got {n_sites}"
        )));
    }
    let mut s = IntegralSet::zeros(n_sites, n_sites);
    for i in 0..n_sites - 1 {
        s.int1e[(i, i + 1)] = -t;
        s.int1e[(i + 1, i)] = -t;
    }
    if periodic && n_sites > 2 {
        s.int1e[(0, n_sites - 1)] = -t;
        s.int1e[(n_sites - 1, 0)] = -t;
    }
    for i in 0..n_sites {
        s.set_eri(i, i, i, i, u);
    }
    Ok(s)
}

/// Spin-orbital Hamiltonian `Σ h a†a + ½ Σ (pq|rs) a†_p a†_r a_s a_q + e_core`.
///
/// Spin-orbital `i < N` is beta orbital `i`, `i ≥ N` is alpha orbital `i − N`.
/// Two-body terms are antisymmetrized onto `a†_P a†_Q a_R a_S` with `P < Q`
/// and `R < S`.
pub fn build_fermion_hamiltonian(s: &IntegralSet) -> FermionOperator {
    let n = s.n_orb;
    let ns = 2 * n;
    let mut op = FermionOperator::identity(ns, s.e_core);
    let spatial = |i: usize| i % n;
    let spin = |i: usize| i / n;

    for p in 0..ns {
        for q in 0..ns {
            if spin(p) != spin(q) {
                continue;
            }
            let h = s.int1e[(spatial(p), spatial(q))];
            if h.abs() > TERM_CUTOFF {
                op.add_term(&[Ladder::create(p), Ladder::annihilate(q)], h)
                    .expect("indices in range");
            }
        }
    }

    // ⟨AB|CD⟩-style element of a†_A a†_B a_C a_D before antisymmetrization:
    // ½ (AD|BC) with σ_A = σ_D and σ_B = σ_C
    let coulomb = |a: usize, d: usize, b: usize, c: usize| -> f64 {
        if spin(a) != spin(d) || spin(b) != spin(c) {
            0.0
        } else {
            s.eri(spatial(a), spatial(d), spatial(b), spatial(c))
        }
    };
    for a in 0..ns {
        for b in a + 1..ns {
            for c in 0..ns {
                for d in c + 1..ns {
                    let v = coulomb(a, d, b, c) - coulomb(a, c, b, d);
                    if v.abs() > TERM_CUTOFF {
                        op.add_term(
                            &[
                                Ladder::create(a),
                                Ladder::create(b),
                                Ladder::annihilate(c),
                                Ladder::annihilate(d),
                            ],
                            v,
                        )
                        .expect("indices in range");
                    }
                }
            }
        }
    }
    op
}
