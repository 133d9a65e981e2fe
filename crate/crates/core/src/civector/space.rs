use std::fmt;

use crate::linalg::binomial;
use crate::{Error, Result};

/// Spin-orbital occupation bitmask: bit `i < n_orb` is beta orbital `i`,
/// bit `n_orb + i` is alpha orbital `i`.
pub type Determinant = u128;

/// Closed-shell determinant space with ascending string ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct CISpace {
    pub n_orb: usize,
    pub n_alpha: usize,
    pub n_beta: usize,
    pub alpha_strings: Vec<u64>,
    pub beta_strings: Vec<u64>,
    binom: Vec<Vec<u64>>,
}

fn strings(n_orb: usize, n_occ: usize) -> Vec<u64> {
    let total = binomial(n_orb, n_occ) as usize;
    let mut out = Vec::with_capacity(total);
    if n_occ == 0 {
        out.push(0);
        return out;
    }
    if n_occ == 64 {
        out.push(u64::MAX);
        return out;
    }
    // Gosper's hack enumerates fixed-popcount masks in increasing order
    let mut s: u64 = (1u64 << n_occ) - 1;
    let limit: u128 = 1u128 << n_orb;
    while (s as u128) < limit {
        out.push(s);
        let c = s & s.wrapping_neg();
        let r = s.wrapping_add(c);
        if r == 0 {
            break;
        }
        s = (((r ^ s) >> 2) / c) | r;
    }
    out
}

/// `C(n_orb, n_elec/2)²`, without enumerating strings.
pub fn ci_space_dim(n_orb: usize, n_elec: usize) -> Result<u64> {
    check_shape(n_orb, n_elec)?;
    let s = binomial(n_orb, n_elec / 2);
    Ok(s * s)
}

fn check_shape(n_orb: usize, n_elec: usize) -> Result<()> {
    if !n_elec.is_multiple_of(2) {
        return Err(Error::UnsupportedOpenShell(format!("{n_elec} electrons")));
    }
    if n_elec > 2 * n_orb {
        return Err(Error::InvalidModel(format!(
            "{n_elec} electrons do not fit in {n_orb} orbitals"
        )));
    }
    if n_orb > 64 {
        return Err(Error::SizeLimit(format!("{n_orb} spatial orbitals exceeds 64")));
    }
    Ok(())
}

impl CISpace {
    pub fn new(n_orb: usize, n_elec: usize) -> Result<Self> {
        check_shape(n_orb, n_elec)?;
        let binom = (0..=n_orb)
            .map(|n| (0..=n_orb.max(1)).map(|k| binomial(n, k)).collect())
            .collect();
        Ok(Self {
            n_orb,
            n_alpha: n_elec / 2,
            n_beta: n_elec / 2,
            alpha_strings: strings(n_orb, n_elec / 2),
            beta_strings: strings(n_orb, n_elec / 2),
            binom,
        })
    }

    pub fn n_elec(&self) -> usize {
        self.n_alpha + self.n_beta
    }

    pub fn n_spin_orbitals(&self) -> usize {
        2 * self.n_orb
    }

    pub fn dim(&self) -> usize {
        self.alpha_strings.len() * self.beta_strings.len()
    }

    /// Position of a string among those with the same popcount.
    #[inline]
    pub fn string_index(&self, s: u64) -> usize {
        let mut rank = 0u64;
        let mut rest = s;
        let mut k = 1;
        while rest != 0 {
            let pos = rest.trailing_zeros() as usize;
            rank += self.binom[pos][k];
            rest &= rest - 1;
            k += 1;
        }
        rank as usize
    }

    #[inline]
    pub fn det(&self, index: usize) -> Determinant {
        let nb = self.beta_strings.len();
        let a = self.alpha_strings[index / nb] as u128;
        let b = self.beta_strings[index % nb] as u128;
        (a << self.n_orb) | b
    }

    /// Index of a determinant, assuming it lies in this space.
    #[inline]
    pub fn index_of(&self, det: Determinant) -> usize {
        let mask = (1u128 << self.n_orb) - 1;
        let b = (det & mask) as u64;
        let a = (det >> self.n_orb) as u64;
        self.string_index(a) * self.beta_strings.len() + self.string_index(b)
    }

    pub fn contains(&self, det: Determinant) -> bool {
        let mask = (1u128 << self.n_orb) - 1;
        det >> (2 * self.n_orb) == 0
            && (det & mask).count_ones() as usize == self.n_beta
            && (det >> self.n_orb).count_ones() as usize == self.n_alpha
    }

    pub fn hf_determinant(&self) -> Determinant {
        let a = (1u128 << self.n_alpha) - 1;
        let b = (1u128 << self.n_beta) - 1;
        (a << self.n_orb) | b
    }

    pub fn hf_vector(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.dim()];
        v[self.index_of(self.hf_determinant())] = 1.0;
        v
    }

    /// Qubit-ordered bitstring: leftmost character is the highest spin-orbital.
    pub fn bitstring(&self, det: Determinant) -> String {
        let n = self.n_spin_orbitals();
        (0..n)
            .rev()
            .map(|i| if det >> i & 1 == 1 { '1' } else { '0' })
            .collect()
    }
}

/// Annihilates spin-orbital `i`, returning the new determinant and whether
/// the JW sign is negative.
#[inline]
pub fn annihilate(det: Determinant, i: usize) -> Option<(Determinant, bool)> {
    let bit = 1u128 << i;
    if det & bit == 0 {
        return None;
    }
    Some((det ^ bit, (det & (bit - 1)).count_ones() & 1 == 1))
}

#[inline]
pub fn create(det: Determinant, i: usize) -> Option<(Determinant, bool)> {
    let bit = 1u128 << i;
    if det & bit != 0 {
        return None;
    }
    Some((det | bit, (det & (bit - 1)).count_ones() & 1 == 1))
}

/// Unitary excitation `a†_{c1}…a†_{ck} a_{a1}…a_{ak} − h.c.` written as the
/// index tuple `(c1, …, ck, a1, …, ak)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Excitation(Vec<usize>);

impl Excitation {
    pub fn new(indices: impl Into<Vec<usize>>) -> Result<Self> {
        let v: Vec<usize> = indices.into();
        if v.len() < 2 || !v.len().is_multiple_of(2) {
            return Err(Error::InvalidExcitation(format!("{v:?} must have even length ≥ 2")));
        }
        let k = v.len() / 2;
        for half in [&v[..k], &v[k..]] {
            for (i, a) in half.iter().enumerate() {
                if half[i + 1..].contains(a) {
                    return Err(Error::InvalidExcitation(format!("{v:?} repeats index {a}")));
                }
            }
        }
        Ok(Self(v))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn creators(&self) -> &[usize] {
        &self.0[..self.0.len() / 2]
    }

    pub fn annihilators(&self) -> &[usize] {
        &self.0[self.0.len() / 2..]
    }

    pub fn rank(&self) -> usize {
        self.0.len() / 2
    }

    /// Checks index ranges and per-spin particle conservation for `n_orb` spatial orbitals.
    pub fn validate(&self, n_orb: usize) -> Result<()> {
        if let Some(&i) = self.0.iter().find(|&&i| i >= 2 * n_orb) {
            return Err(Error::InvalidExcitation(format!("{self}: index {i} ≥ {}", 2 * n_orb)));
        }
        let beta = |xs: &[usize]| xs.iter().filter(|&&i| i < n_orb).count();
        if beta(self.creators()) != beta(self.annihilators()) {
            return Err(Error::InvalidExcitation(format!("{self} changes the spin sectors")));
        }
        Ok(())
    }

    /// `g|det⟩` as `(det', negative_sign)`, or `None` when annihilated.
    #[inline]
    pub fn act(&self, det: Determinant) -> Option<(Determinant, bool)> {
        let mut d = det;
        let mut neg = false;
        for &i in self.annihilators().iter().rev() {
            let (nd, s) = annihilate(d, i)?;
            d = nd;
            neg ^= s;
        }
        for &i in self.creators().iter().rev() {
            let (nd, s) = create(d, i)?;
            d = nd;
            neg ^= s;
        }
        Some((d, neg))
    }
}

impl fmt::Display for Excitation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}
