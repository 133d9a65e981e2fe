use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{DENSE_QUBIT_LIMIT, PRUNE_TOL};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn symbol(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::X => [[o, l], [l, o]],
            Pauli::Y => [[o, -i], [i, o]],
            Pauli::Z => [[l, o], [o, -l]],
        }
    }
}

/// Bitmask form of a Pauli string, in basis-bit space: bit `t` refers to
/// qubit `n - 1 - t`. A set `x` bit with a clear `z` bit is `X`, both set is
/// `Y`, only `z` is `Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PauliKey {
    pub x: u64,
    pub z: u64,
}

const PHASES: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

impl PauliKey {
    pub const IDENTITY: PauliKey = PauliKey { x: 0, z: 0 };

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// `P1 * P2 = i^k * P3`; returns `(P3, i^k)`.
    pub fn mul(&self, other: &PauliKey) -> (PauliKey, Complex64) {
        let out = PauliKey {
            x: self.x ^ other.x,
            z: self.z ^ other.z,
        };
        let k = self.y_count() as i64 + other.y_count() as i64 + 2 * (self.z & other.x).count_ones() as i64
            - out.y_count() as i64;
        (out, PHASES[k.rem_euclid(4) as usize])
    }

    pub fn commutes_with(&self, other: &PauliKey) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    /// Action on a computational basis state: `P|b> = phase |b'>`.
    #[inline]
    pub fn apply_to_basis(&self, b: u64) -> (u64, Complex64) {
        let k = self.y_count() + 2 * (self.z & b).count_ones();
        (b ^ self.x, PHASES[(k % 4) as usize])
    }
}

/// A single weighted Pauli string with explicit qubit labels.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliString {
    pub n_qubits: usize,
    pub letters: BTreeMap<usize, Pauli>,
    pub coefficient: Complex64,
}

impl PauliString {
    pub fn new(n_qubits: usize, letters: &[(usize, Pauli)], coefficient: Complex64) -> Result<Self> {
        let mut map = BTreeMap::new();
        for &(q, p) in letters {
            if q >= n_qubits {
                return Err(Error::InvalidOperator(format!(
                    "qubit {q} out of range for {n_qubits} qubits"
                )));
            }
            if map.insert(q, p).is_some() {
                return Err(Error::InvalidOperator(format!("qubit {q} appears twice")));
            }
        }
        Ok(Self {
            n_qubits,
            letters: map,
            coefficient,
        })
    }

    pub fn key(&self) -> PauliKey {
        let mut key = PauliKey::default();
        for (&q, &p) in &self.letters {
            let bit = 1u64 << (self.n_qubits - 1 - q);
            match p {
                Pauli::X => key.x |= bit,
                Pauli::Y => {
                    key.x |= bit;
                    key.z |= bit
                }
                Pauli::Z => key.z |= bit,
            }
        }
        key
    }

    /// Compact label such as `X0 Y2 Z3`; empty for the identity.
    pub fn label(&self) -> String {
        self.letters
            .iter()
            .map(|(q, p)| format!("{}{}", p.symbol(), q))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn key_to_letters(n_qubits: usize, key: &PauliKey) -> BTreeMap<usize, Pauli> {
    let mut letters = BTreeMap::new();
    for t in 0..n_qubits {
        let bit = 1u64 << t;
        let p = match (key.x & bit != 0, key.z & bit != 0) {
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
            (false, false) => continue,
        };
        letters.insert(n_qubits - 1 - t, p);
    }
    letters
}

/// Weighted sum of Pauli strings on a fixed register.
///
/// Terms keep their insertion order, which downstream code relies on when
/// it turns a Hamiltonian into an ordered product of rotations.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitOperator {
    n_qubits: usize,
    terms: IndexMap<PauliKey, Complex64>,
}

impl QubitOperator {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits > 64 {
            return Err(Error::SizeLimit(format!(
                "{n_qubits} qubits exceeds the 64-qubit operator limit"
            )));
        }
        Ok(Self {
            n_qubits,
            terms: IndexMap::new(),
        })
    }

    pub fn identity(n_qubits: usize, coefficient: Complex64) -> Result<Self> {
        let mut op = Self::new(n_qubits)?;
        op.add_raw(PauliKey::IDENTITY, coefficient);
        Ok(op)
    }

    pub fn from_string(s: &PauliString) -> Result<Self> {
        let mut op = Self::new(s.n_qubits)?;
        op.add_raw(s.key(), s.coefficient);
        Ok(op)
    }

    /// Convenience constructor for a single string given as `(qubit, letter)` pairs.
    pub fn single(n_qubits: usize, letters: &[(usize, Pauli)], coefficient: Complex64) -> Result<Self> {
        Self::from_string(&PauliString::new(n_qubits, letters, coefficient)?)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn add_raw(&mut self, key: PauliKey, c: Complex64) {
        *self.terms.entry(key).or_insert(Complex64::new(0.0, 0.0)) += c;
    }

    pub fn raw_terms(&self) -> impl Iterator<Item = (&PauliKey, &Complex64)> {
        self.terms.iter()
    }

    pub fn terms(&self) -> impl Iterator<Item = PauliString> + '_ {
        self.terms.iter().map(|(k, c)| PauliString {
            n_qubits: self.n_qubits,
            letters: key_to_letters(self.n_qubits, k),
            coefficient: *c,
        })
    }

    pub fn coefficient(&self, letters: &[(usize, Pauli)]) -> Result<Complex64> {
        let key = PauliString::new(self.n_qubits, letters, Complex64::new(1.0, 0.0))?.key();
        Ok(self.terms.get(&key).copied().unwrap_or_default())
    }

    pub fn constant(&self) -> Complex64 {
        self.terms.get(&PauliKey::IDENTITY).copied().unwrap_or_default()
    }

    fn check_size(&self, other: &Self) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::InvalidOperator(format!(
                "register size mismatch: {} vs {}",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_size(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_raw(*k, *c);
        }
        Ok(out.simplify())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(|(k, c)| (*k, c * factor)).collect(),
        }
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_size(other)?;
        let mut out = Self {
            n_qubits: self.n_qubits,
            terms: IndexMap::new(),
        };
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let (k, phase) = ka.mul(kb);
                out.add_raw(k, ca * cb * phase);
            }
        }
        Ok(out.simplify())
    }

    /// Drops terms with `|c| < 1e-12`. Duplicates are merged on insertion.
    pub fn simplify(&self) -> Self {
        Self {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.norm() >= PRUNE_TOL)
                .map(|(k, c)| (*k, *c))
                .collect(),
        }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.im.abs() <= tol)
    }

    /// Matrix-free action on a statevector of length `2^n`.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != 1usize << self.n_qubits {
            return Err(Error::InvalidOperator(format!(
                "state of length {} does not match {} qubits",
                v.len(),
                self.n_qubits
            )));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        for (k, c) in &self.terms {
            for (b, amp) in v.iter().enumerate() {
                let (b2, phase) = k.apply_to_basis(b as u64);
                out[b2 as usize] += c * phase * amp;
            }
        }
        Ok(out)
    }

    pub fn to_dense_matrix(&self) -> Result<DMatrix<Complex64>> {
        if self.n_qubits > DENSE_QUBIT_LIMIT {
            return Err(Error::SizeLimit(format!(
                "dense matrix of {} qubits exceeds the {DENSE_QUBIT_LIMIT}-qubit guard",
                self.n_qubits
            )));
        }
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for (k, c) in &self.terms {
            for b in 0..dim {
                let (b2, phase) = k.apply_to_basis(b as u64);
                m[(b2 as usize, b)] += c * phase;
            }
        }
        Ok(m)
    }
}

fn format_coefficient(c: &Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.im < 0.0 || c.im.is_sign_negative() {
        format!("{}{}j", c.re, c.im)
    } else {
        format!("{}+{}j", c.re, c.im)
    }
}

fn parse_coefficient(s: &str) -> std::result::Result<Complex64, String> {
    let t = s.trim().trim_start_matches('(').trim_end_matches(')');
    if let Some(body) = t.strip_suffix('j') {
        // split at the last sign that is not part of an exponent
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
        return match split {
            Some(i) => {
                let re = body[..i].parse::<f64>().map_err(|e| e.to_string())?;
                let im = body[i..].parse::<f64>().map_err(|e| e.to_string())?;
                Ok(Complex64::new(re, im))
            }
            None => Ok(Complex64::new(0.0, body.parse::<f64>().map_err(|e| e.to_string())?)),
        };
    }
    t.parse::<f64>()
        .map(|re| Complex64::new(re, 0.0))
        .map_err(|e| e.to_string())
}

impl fmt::Display for QubitOperator {
    /// One term per line: `coeff X0 Y2 Z3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.terms() {
            let label = s.label();
            if label.is_empty() {
                writeln!(f, "{}", format_coefficient(&s.coefficient))?;
            } else {
                writeln!(f, "{} {}", format_coefficient(&s.coefficient), label)?;
            }
        }
        Ok(())
    }
}

impl QubitOperator {
    /// Parses the line format written by `Display`.
    pub fn parse(n_qubits: usize, text: &str) -> Result<Self> {
        let mut op = Self::new(n_qubits)?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| Error::Parse { line: lineno + 1, msg };
            let mut parts = line.split_whitespace();
            let coeff = parse_coefficient(parts.next().unwrap_or_default()).map_err(err)?;
            let mut letters = Vec::new();
            for tok in parts {
                let mut chars = tok.chars();
                let p = match chars.next() {
                    Some('X') => Pauli::X,
                    Some('Y') => Pauli::Y,
                    Some('Z') => Pauli::Z,
                    _ => return Err(err(format!("bad Pauli token {tok:?}"))),
                };
                let q: usize = chars
                    .as_str()
                    .parse()
                    .map_err(|_| err(format!("bad qubit index in {tok:?}")))?;
                letters.push((q, p));
            }
            let s = PauliString::new(n_qubits, &letters, coeff).map_err(|e| err(e.to_string()))?;
            op.add_raw(s.key(), coeff);
        }
        Ok(op)
    }
}

impl FromStr for Pauli {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "X" => Ok(Pauli::X),
            "Y" => Ok(Pauli::Y),
            "Z" => Ok(Pauli::Z),
            _ => Err(Error::InvalidOperator(format!("unknown Pauli {s:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn x_times_y_is_i_z() {
        let x = QubitOperator::single(1, &[(0, Pauli::X)], c(1.0, 0.0)).unwrap();
        let y = QubitOperator::single(1, &[(0, Pauli::Y)], c(1.0, 0.0)).unwrap();
        let p = x.multiply(&y).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.coefficient(&[(0, Pauli::Z)]).unwrap(), c(0.0, 1.0));
    }

    #[test]
    fn square_of_commuting_sum() {
        let z0 = QubitOperator::single(2, &[(0, Pauli::Z)], c(1.0, 0.0)).unwrap();
        let x1 = QubitOperator::single(2, &[(1, Pauli::X)], c(1.0, 0.0)).unwrap();
        let s = z0.add(&x1).unwrap();
        let sq = s.multiply(&s).unwrap();
        assert_eq!(sq.len(), 2);
        assert!((sq.constant() - c(2.0, 0.0)).norm() < 1e-15);
        assert!((sq.coefficient(&[(0, Pauli::Z), (1, Pauli::X)]).unwrap() - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn z0_is_most_significant() {
        let z0 = QubitOperator::single(2, &[(0, Pauli::Z)], c(1.0, 0.0)).unwrap();
        let m = z0.to_dense_matrix().unwrap();
        let diag: Vec<f64> = (0..4).map(|i| m[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, 1.0, -1.0, -1.0]);
    }

    #[test]
    fn x1_flips_least_significant_bit() {
        let x1 = QubitOperator::single(2, &[(1, Pauli::X)], c(1.0, 0.0)).unwrap();
        let m = x1.to_dense_matrix().unwrap();
        assert_eq!(m[(1, 0)], c(1.0, 0.0));
        assert_eq!(m[(0, 1)], c(1.0, 0.0));
        assert_eq!(m[(3, 2)], c(1.0, 0.0));
        assert_eq!(m[(2, 0)], c(0.0, 0.0));
    }

    #[test]
    fn dense_is_linear() {
        let a = QubitOperator::single(2, &[(0, Pauli::X), (1, Pauli::Y)], c(0.3, 0.0)).unwrap();
        let b = QubitOperator::single(2, &[(1, Pauli::Z)], c(-1.1, 0.0)).unwrap();
        let sum = a.add(&b).unwrap().to_dense_matrix().unwrap();
        let sep = a.to_dense_matrix().unwrap() + b.to_dense_matrix().unwrap();
        assert!((sum - sep).norm() < 1e-14);
    }

    #[test]
    fn size_mismatch_is_rejected() {
        let a = QubitOperator::identity(2, c(1.0, 0.0)).unwrap();
        let b = QubitOperator::identity(3, c(1.0, 0.0)).unwrap();
        assert!(matches!(a.multiply(&b), Err(Error::InvalidOperator(_))));
        assert!(matches!(a.add(&b), Err(Error::InvalidOperator(_))));
    }

    #[test]
    fn dense_guard() {
        let a = QubitOperator::identity(15, c(1.0, 0.0)).unwrap();
        assert!(matches!(a.to_dense_matrix(), Err(Error::SizeLimit(_))));
    }

    #[test]
    fn text_round_trip() {
        let mut op = QubitOperator::single(4, &[(0, Pauli::X), (2, Pauli::Y), (3, Pauli::Z)], c(0.25, 0.0)).unwrap();
        op = op.add(&QubitOperator::identity(4, c(-0.5, 1e-3)).unwrap()).unwrap();
        let text = op.to_string();
        assert!(text.contains("0.25 X0 Y2 Z3"));
        let back = QubitOperator::parse(4, &text).unwrap();
        assert_eq!(back, op);
    }

    #[test]
    fn simplify_prunes() {
        let a = QubitOperator::single(1, &[(0, Pauli::X)], c(1e-13, 0.0)).unwrap();
        assert!(a.simplify().is_empty());
    }
}
