use num_complex::Complex64;

use super::{FermionOperator, Ladder, LadderKind, PauliKey, QubitOperator};
use crate::{Error, Result};

type Terms = Vec<(PauliKey, Complex64)>;

fn half(re: f64, im: f64) -> Complex64 {
    Complex64::new(0.5 * re, 0.5 * im)
}

/// `a_j = Z_{<j} (X + iY)/2` on bit `j`; creation flips the sign of the `Y` part.
fn jw_ladder(l: Ladder) -> Terms {
    let bit = 1u64 << l.index;
    let below = bit - 1;
    let sign = if l.kind == LadderKind::Create { -1.0 } else { 1.0 };
    vec![
        (PauliKey { x: bit, z: below }, half(1.0, 0.0)),
        (PauliKey { x: bit, z: below | bit }, half(0.0, sign)),
    ]
}

/// Parity encoding: bit `t` stores the parity of spin-orbitals `0..=t`.
/// `a_j = X_{>j} (X_j Z_{j-1} + i Y_j)/2`.
fn parity_ladder(l: Ladder, n: usize) -> Terms {
    let bit = 1u64 << l.index;
    let above = if n == 64 { !0u64 } else { (1u64 << n) - 1 } & !((bit << 1).wrapping_sub(1));
    let prev = if l.index == 0 { 0 } else { 1u64 << (l.index - 1) };
    let sign = if l.kind == LadderKind::Create { -1.0 } else { 1.0 };
    vec![
        (
            PauliKey {
                x: above | bit,
                z: prev,
            },
            half(1.0, 0.0),
        ),
        (PauliKey { x: above | bit, z: bit }, half(0.0, sign)),
    ]
}

fn map_operator(op: &FermionOperator, image: impl Fn(Ladder) -> Terms) -> Result<QubitOperator> {
    let n = op.n_spin_orbitals();
    if n == 0 {
        return Err(Error::InvalidOperator("operator has no spin-orbitals".into()));
    }
    if n > 64 {
        return Err(Error::SizeLimit(format!(
            "{n} spin-orbitals exceeds the 64-qubit limit"
        )));
    }
    let mut out = QubitOperator::new(n)?;
    for term in op.terms() {
        let mut acc: Terms = vec![(PauliKey::IDENTITY, Complex64::new(term.coefficient, 0.0))];
        for &l in &term.factors {
            if l.index >= n {
                return Err(Error::InvalidOperator(format!("spin-orbital {} out of range", l.index)));
            }
            let img = image(l);
            let mut next = Vec::with_capacity(acc.len() * img.len());
            for (ka, ca) in &acc {
                for (kb, cb) in &img {
                    let (k, phase) = ka.mul(kb);
                    next.push((k, ca * cb * phase));
                }
            }
            acc = next;
        }
        for (k, c) in acc {
            out.add_raw(k, c);
        }
    }
    Ok(out.simplify())
}

/// Jordan–Wigner image with `n_qubits = n_spin_orbitals`.
pub fn jordan_wigner(op: &FermionOperator) -> Result<QubitOperator> {
    map_operator(op, jw_ladder)
}

/// Parity-encoded image. With `reduce_two_qubits`, the qubits holding the
/// beta-sector parity (spin-orbital `n/2 - 1`) and the total parity
/// (spin-orbital `n - 1`) are replaced by their eigenvalues and removed.
pub fn parity_transform(op: &FermionOperator, n_elec: usize, reduce_two_qubits: bool) -> Result<QubitOperator> {
    let n = op.n_spin_orbitals();
    let full = map_operator(op, |l| parity_ladder(l, n))?;
    if !reduce_two_qubits {
        return Ok(full);
    }
    if !n_elec.is_multiple_of(2) {
        return Err(Error::UnsupportedReduction(format!(
            "two-qubit reduction needs an even electron count, got {n_elec}"
        )));
    }
    if !n.is_multiple_of(2) || n < 4 {
        return Err(Error::UnsupportedReduction(format!(
            "two-qubit reduction needs an even number of at least 4 spin-orbitals, got {n}"
        )));
    }
    let n_orb = n / 2;
    let sector_bit = 1u64 << (n_orb - 1);
    let total_bit = 1u64 << (n - 1);
    let sector_sign = if (n_elec / 2).is_multiple_of(2) { 1.0 } else { -1.0 };

    let compact = |mask: u64| -> u64 {
        let low = mask & (sector_bit - 1);
        let mid = (mask & (total_bit - 1) & !((sector_bit << 1) - 1)) >> 1;
        low | mid
    };

    let mut out = QubitOperator::new(n - 2)?;
    for (k, c) in full.raw_terms() {
        let removed = sector_bit | total_bit;
        if k.x & removed != 0 {
            return Err(Error::UnsupportedReduction(
                "operator does not conserve particle number and S_z".into(),
            ));
        }
        let mut coeff = *c;
        if k.z & sector_bit != 0 {
            coeff *= sector_sign;
        }
        // total parity of an even electron count is +1
        out.add_raw(
            PauliKey {
                x: compact(k.x),
                z: compact(k.z),
            },
            coeff,
        );
    }
    Ok(out.simplify())
}
