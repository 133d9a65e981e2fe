use nalgebra::DMatrix;

use super::space::{annihilate, create, CISpace};

/// Spin-traced one-particle density matrix `γ_pq = Σ_σ ⟨a†_pσ a_qσ⟩`.
pub fn make_rdm1(space: &CISpace, v: &[f64]) -> DMatrix<f64> {
    let n = space.n_orb;
    let ns = 2 * n;
    let mut g = DMatrix::zeros(n, n);
    for (i, &ci) in v.iter().enumerate() {
        if ci == 0.0 {
            continue;
        }
        let det = space.det(i);
        for q in (0..ns).filter(|&q| det >> q & 1 == 1) {
            let (d1, s1) = annihilate(det, q).unwrap();
            let sector = (q / n) * n;
            for p in sector..sector + n {
                if let Some((d2, s2)) = create(d1, p) {
                    let sign = if s1 ^ s2 { -1.0 } else { 1.0 };
                    g[(p % n, q % n)] += sign * ci * v[space.index_of(d2)];
                }
            }
        }
    }
    g
}

/// Spin-traced two-particle density matrix
/// `Γ_pqrs = Σ_στ ⟨a†_pσ a†_rτ a_sτ a_qσ⟩`, so that
/// `E = Σ h_pq γ_pq + ½ Σ (pq|rs) Γ_pqrs + e_core`.
/// Stored row-major with the same layout as two-electron integrals.
pub fn make_rdm2(space: &CISpace, v: &[f64]) -> Vec<f64> {
    let n = space.n_orb;
    let ns = 2 * n;
    let mut g = vec![0.0; n.pow(4)];
    let idx = |p: usize, q: usize, r: usize, s: usize| ((p * n + q) * n + r) * n + s;
    for (i, &ci) in v.iter().enumerate() {
        if ci == 0.0 {
            continue;
        }
        let det = space.det(i);
        let occ: Vec<usize> = (0..ns).filter(|&k| det >> k & 1 == 1).collect();
        for &q in &occ {
            let (d1, s1) = annihilate(det, q).unwrap();
            for &s in occ.iter().filter(|&&s| s != q) {
                let (d2, s2) = annihilate(d1, s).unwrap();
                let rsec = (s / n) * n;
                let psec = (q / n) * n;
                for r in rsec..rsec + n {
                    let Some((d3, s3)) = create(d2, r) else { continue };
                    for p in psec..psec + n {
                        let Some((d4, s4)) = create(d3, p) else { continue };
                        let sign = if s1 ^ s2 ^ s3 ^ s4 { -1.0 } else { 1.0 };
                        g[idx(p % n, q % n, r % n, s % n)] += sign * ci * v[space.index_of(d4)];
                    }
                }
            }
        }
    }
    g
}
