//! Variational quantum dynamics: symbolic spin/boson Hamiltonians, boson
//! encodings onto qubits, the variational Hamiltonian ansatz and
//! McLachlan time evolution, with exact propagation as a reference.

use std::collections::HashSet;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::operator::{Pauli, PauliKey, QubitOperator};
use crate::{Error, Result};

/// Default eigenvalue regularization of the McLachlan matrix.
pub const DEFAULT_EPSILON_REG: f64 = 1e-5;
/// Unary encoding refuses oscillators larger than this.
pub const UNARY_LIMIT: usize = 16;
/// Largest Hilbert space for exact propagation.
pub const EXACT_DIM_LIMIT: usize = 1 << 12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symbol {
    SigmaX,
    SigmaY,
    SigmaZ,
    B,
    BDag,
    BDagB,
    BDagPlusB,
    X,
    P,
}

impl Symbol {
    pub fn name(self) -> &'static str {
        match self {
            Symbol::SigmaX => "sigma_x",
            Symbol::SigmaY => "sigma_y",
            Symbol::SigmaZ => "sigma_z",
            Symbol::B => "b",
            Symbol::BDag => "b^dagger",
            Symbol::BDagB => "b^dagger b",
            Symbol::BDagPlusB => "b^dagger+b",
            Symbol::X => "x",
            Symbol::P => "p",
        }
    }

    fn is_spin(self) -> bool {
        matches!(self, Symbol::SigmaX | Symbol::SigmaY | Symbol::SigmaZ)
    }
}

impl std::str::FromStr for Symbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s.split_whitespace().collect::<Vec<_>>().join(" ").replace('\\', "");
        Ok(match norm.as_str() {
            "sigma_x" | "X" => Symbol::SigmaX,
            "sigma_y" | "Y" => Symbol::SigmaY,
            "sigma_z" | "Z" => Symbol::SigmaZ,
            "b" => Symbol::B,
            "b^dagger" => Symbol::BDag,
            "b^dagger b" => Symbol::BDagB,
            "b^dagger+b" | "b^dagger + b" => Symbol::BDagPlusB,
            "x" => Symbol::X,
            "p" => Symbol::P,
            _ => return Err(Error::InvalidSymbol(s.to_string())),
        })
    }
}

/// Product of single-dof operators with a real weight. An empty factor list
/// is a multiple of the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicTerm {
    pub factors: Vec<(Symbol, String)>,
    pub coefficient: f64,
}

impl SymbolicTerm {
    pub fn new(factors: &[(Symbol, &str)], coefficient: f64) -> Self {
        Self {
            factors: factors.iter().map(|(s, d)| (*s, d.to_string())).collect(),
            coefficient,
        }
    }

    pub fn constant(coefficient: f64) -> Self {
        Self {
            factors: Vec::new(),
            coefficient,
        }
    }

    /// Parses `coeff symbol@dof [symbol@dof ...]`; symbols containing a
    /// space such as `b^dagger b@boson` are accepted.
    pub fn parse(text: &str) -> Result<Self> {
        let err = |msg: String| Error::Parse { line: 1, msg };
        let mut toks = text.split_whitespace();
        let coefficient: f64 = toks
            .next()
            .ok_or_else(|| err("empty term".into()))?
            .parse()
            .map_err(|_| err(format!("bad coefficient in {text:?}")))?;
        let mut factors = Vec::new();
        let mut pending = String::new();
        for tok in toks {
            if !pending.is_empty() {
                pending.push(' ');
            }
            pending.push_str(tok);
            if let Some((sym, dof)) = pending.rsplit_once('@') {
                factors.push((sym.parse::<Symbol>()?, dof.to_string()));
                pending.clear();
            }
        }
        if !pending.is_empty() {
            return Err(err(format!("factor {pending:?} has no @dof")));
        }
        Ok(Self { factors, coefficient })
    }
}

impl fmt::Display for SymbolicTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coefficient)?;
        for (s, d) in &self.factors {
            write!(f, " {}@{d}", s.name())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasisKind {
    HalfSpin,
    Sho { omega: f64, nbas: usize, mass: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisSpec {
    pub dof: String,
    pub kind: BasisKind,
}

impl BasisSpec {
    pub fn half_spin(dof: &str) -> Self {
        Self {
            dof: dof.into(),
            kind: BasisKind::HalfSpin,
        }
    }

    pub fn sho(dof: &str, omega: f64, nbas: usize) -> Self {
        Self {
            dof: dof.into(),
            kind: BasisKind::Sho { omega, nbas, mass: 1.0 },
        }
    }

    pub fn nbas(&self) -> usize {
        match self.kind {
            BasisKind::HalfSpin => 2,
            BasisKind::Sho { nbas, .. } => nbas,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Encoding {
    Unary,
    Binary,
    Gray,
}

impl std::str::FromStr for Encoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unary" => Ok(Encoding::Unary),
            "binary" => Ok(Encoding::Binary),
            "gray" => Ok(Encoding::Gray),
            _ => Err(Error::InvalidModel(format!("unknown encoding {s:?}"))),
        }
    }
}

fn spin_matrix(s: Symbol) -> Result<DMatrix<Complex64>> {
    let m = match s {
        Symbol::SigmaX => [ZERO, ONE, ONE, ZERO],
        Symbol::SigmaY => [ZERO, -I, I, ZERO],
        Symbol::SigmaZ => [ONE, ZERO, ZERO, -ONE],
        _ => return Err(Error::InvalidSymbol(format!("{} on a spin-1/2 dof", s.name()))),
    };
    Ok(DMatrix::from_row_slice(2, 2, &m))
}

/// Truncated oscillator matrix of `symbol` in the number basis.
pub fn boson_matrix(symbol: Symbol, basis: &BasisSpec) -> Result<DMatrix<Complex64>> {
    let BasisKind::Sho { omega, nbas, mass } = basis.kind else {
        return Err(Error::InvalidSymbol(format!(
            "{} on spin dof {}",
            symbol.name(),
            basis.dof
        )));
    };
    if nbas < 2 {
        return Err(Error::InvalidModel(format!("oscillator {} needs nbas ≥ 2", basis.dof)));
    }
    let b = DMatrix::from_fn(nbas, nbas, |i, j| {
        if j == i + 1 {
            Complex64::new((j as f64).sqrt(), 0.0)
        } else {
            ZERO
        }
    });
    let bd = b.adjoint();
    Ok(match symbol {
        Symbol::B => b,
        Symbol::BDag => bd,
        Symbol::BDagB => &bd * &b,
        Symbol::BDagPlusB => &bd + &b,
        Symbol::X => (&bd + &b) * Complex64::new((0.5 / (mass * omega)).sqrt(), 0.0),
        Symbol::P => (&bd - &b) * Complex64::new(0.0, (0.5 * mass * omega).sqrt()),
        _ => {
            return Err(Error::InvalidSymbol(format!(
                "{} on oscillator {}",
                symbol.name(),
                basis.dof
            )))
        }
    })
}

fn local_matrix(symbol: Symbol, basis: &BasisSpec) -> Result<DMatrix<Complex64>> {
    match basis.kind {
        BasisKind::HalfSpin => spin_matrix(symbol),
        BasisKind::Sho { .. } if symbol.is_spin() => Err(Error::InvalidSymbol(format!(
            "{} on oscillator {}",
            symbol.name(),
            basis.dof
        ))),
        BasisKind::Sho { .. } => boson_matrix(symbol, basis),
    }
}

fn gray(n: usize) -> usize {
    n ^ (n >> 1)
}

/// Number of qubits a dof occupies.
pub fn qubits_for(basis: &BasisSpec, encoding: Encoding) -> usize {
    match basis.kind {
        BasisKind::HalfSpin => 1,
        BasisKind::Sho { nbas, .. } => match encoding {
            Encoding::Unary => nbas,
            _ => nbas.next_power_of_two().trailing_zeros().max(1) as usize,
        },
    }
}

/// Local basis index (first local qubit most significant) of physical level `n`.
fn code(basis: &BasisSpec, encoding: Encoding, n: usize) -> usize {
    match (basis.kind, encoding) {
        (BasisKind::HalfSpin, _) => n,
        (BasisKind::Sho { nbas, .. }, Encoding::Unary) => 1 << (nbas - 1 - n),
        (_, Encoding::Binary) => n,
        (_, Encoding::Gray) => gray(n),
    }
}

type LocalTerms = Vec<(Vec<(usize, Pauli)>, Complex64)>;

/// Pauli expansion on `k` local qubits of `Σ O_mn |code m⟩⟨code n|`.
fn expand_dense(m: &DMatrix<Complex64>, k: usize, codes: &[usize]) -> LocalTerms {
    let dim = 1usize << k;
    let mut e = DMatrix::<Complex64>::zeros(dim, dim);
    for (i, &ci) in codes.iter().enumerate() {
        for (j, &cj) in codes.iter().enumerate() {
            e[(ci, cj)] = m[(i, j)];
        }
    }
    let mut out = Vec::new();
    let letters = [None, Some(Pauli::X), Some(Pauli::Y), Some(Pauli::Z)];
    for idx in 0..(1usize << (2 * k)) {
        let mut key = PauliKey::default();
        let mut word = Vec::new();
        for q in 0..k {
            if let Some(p) = letters[(idx >> (2 * (k - 1 - q))) & 3] {
                let bit = 1u64 << (k - 1 - q);
                match p {
                    Pauli::X => key.x |= bit,
                    Pauli::Y => {
                        key.x |= bit;
                        key.z |= bit;
                    }
                    Pauli::Z => key.z |= bit,
                }
                word.push((q, p));
            }
        }
        let mut tr = ZERO;
        for col in 0..dim {
            let (row, ph) = key.apply_to_basis(col as u64);
            tr += ph * e[(col, row as usize)];
        }
        let coeff = tr / dim as f64;
        if coeff.norm() >= 1e-14 {
            out.push((word, coeff));
        }
    }
    out
}

/// One-hot expansion: `|n⟩⟨n| → (I − Z_n)/2`, `|m⟩⟨n| → σ⁺_m σ⁻_n`.
/// Exact on the one-hot subspace only.
fn expand_unary(m: &DMatrix<Complex64>) -> LocalTerms {
    let nbas = m.nrows();
    let mut out: LocalTerms = Vec::new();
    let half = Complex64::new(0.5, 0.0);
    for i in 0..nbas {
        for j in 0..nbas {
            let a = m[(i, j)];
            if a.norm() < 1e-14 {
                continue;
            }
            if i == j {
                out.push((vec![], a * half));
                out.push((vec![(i, Pauli::Z)], -a * half));
            } else {
                // σ⁺ = (X − iY)/2 raises |0⟩ to |1⟩, σ⁻ = (X + iY)/2
                let (lo, hi) = (i.min(j), i.max(j));
                let sp = [(Pauli::X, ONE), (Pauli::Y, -I)];
                let sm = [(Pauli::X, ONE), (Pauli::Y, I)];
                for (pi, ci) in sp {
                    for (pj, cj) in sm {
                        let w = a * ci * cj * 0.25;
                        let (l1, l2) = if lo == i {
                            ((i, pi), (j, pj))
                        } else {
                            ((j, pj), (i, pi))
                        };
                        debug_assert!(l1.0 == lo && l2.0 == hi);
                        out.push((vec![l1, l2], w));
                    }
                }
            }
        }
    }
    out
}

/// Qubit form of a symbolic Hamiltonian. The identity part is kept apart in `constant`.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedHamiltonian {
    pub qubit_terms: QubitOperator,
    pub constant: f64,
    /// `(dof, sub-qubit label)` for each qubit, qubit 0 first.
    pub qubit_layout: Vec<(String, String)>,
}

impl EncodedHamiltonian {
    pub fn n_qubits(&self) -> usize {
        self.qubit_layout.len()
    }

    /// Dense matrix of the qubit terms without the constant.
    pub fn dense_terms(&self) -> Result<DMatrix<Complex64>> {
        self.qubit_terms.to_dense_matrix()
    }

    /// Dense matrix including the constant.
    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        let d = 1 << self.n_qubits();
        Ok(self.dense_terms()? + DMatrix::identity(d, d) * Complex64::new(self.constant, 0.0))
    }
}

fn find_dof<'a>(basis: &'a [BasisSpec], dof: &str) -> Result<(usize, &'a BasisSpec)> {
    basis
        .iter()
        .enumerate()
        .find(|(_, b)| b.dof == dof)
        .ok_or_else(|| Error::InvalidModel(format!("dof {dof:?} is not in the basis")))
}

fn check_basis(basis: &[BasisSpec]) -> Result<()> {
    let mut seen = HashSet::new();
    for b in basis {
        if !seen.insert(&b.dof) {
            return Err(Error::InvalidModel(format!("dof {:?} listed twice", b.dof)));
        }
        if let BasisKind::Sho { nbas, omega, mass } = b.kind {
            if nbas < 2 || omega <= 0.0 || mass <= 0.0 {
                return Err(Error::InvalidModel(format!(
                    "bad oscillator parameters for {:?}",
                    b.dof
                )));
            }
        }
    }
    Ok(())
}

pub fn qubit_encode(terms: &[SymbolicTerm], basis: &[BasisSpec], encoding: Encoding) -> Result<EncodedHamiltonian> {
    check_basis(basis)?;
    let mut layout = Vec::new();
    let mut offsets = Vec::new();
    for b in basis {
        if encoding == Encoding::Unary && b.nbas() > UNARY_LIMIT && matches!(b.kind, BasisKind::Sho { .. }) {
            return Err(Error::SizeLimit(format!(
                "unary encoding of {} levels exceeds {UNARY_LIMIT}",
                b.nbas()
            )));
        }
        offsets.push(layout.len());
        let k = qubits_for(b, encoding);
        match b.kind {
            BasisKind::HalfSpin => layout.push((b.dof.clone(), String::new())),
            BasisKind::Sho { .. } => {
                for j in 0..k {
                    layout.push((b.dof.clone(), format!("q{j}")));
                }
            }
        }
    }
    let n = layout.len();
    let mut total = QubitOperator::new(n)?;
    let mut constant = 0.0;
    for term in terms {
        let mut used = HashSet::new();
        let mut op = QubitOperator::identity(n, Complex64::new(term.coefficient, 0.0))?;
        for (sym, dof) in &term.factors {
            if !used.insert(dof) {
                return Err(Error::InvalidModel(format!("dof {dof:?} appears twice in one term")));
            }
            let (idx, b) = find_dof(basis, dof)?;
            let m = local_matrix(*sym, b)?;
            let k = qubits_for(b, encoding);
            let local = match (b.kind, encoding) {
                (BasisKind::Sho { .. }, Encoding::Unary) => expand_unary(&m),
                _ => {
                    let codes: Vec<usize> = (0..b.nbas()).map(|l| code(b, encoding, l)).collect();
                    expand_dense(&m, k, &codes)
                }
            };
            let mut lifted = QubitOperator::new(n)?;
            for (word, c) in local {
                let letters: Vec<(usize, Pauli)> = word.iter().map(|&(q, p)| (offsets[idx] + q, p)).collect();
                lifted = lifted.add(&QubitOperator::single(n, &letters, c)?)?;
            }
            op = op.multiply(&lifted)?;
        }
        total = total.add(&op)?;
    }
    let mut qubit_terms = QubitOperator::new(n)?;
    for s in total.simplify().terms() {
        if s.coefficient.im.abs() > 1e-10 {
            return Err(Error::InvalidModel("encoded Hamiltonian is not Hermitian".into()));
        }
        if s.letters.is_empty() {
            constant += s.coefficient.re;
        } else {
            let re = Complex64::new(s.coefficient.re, 0.0);
            let letters: Vec<(usize, Pauli)> = s.letters.iter().map(|(&q, &p)| (q, p)).collect();
            qubit_terms = qubit_terms.add(&QubitOperator::single(n, &letters, re)?)?;
        }
    }
    Ok(EncodedHamiltonian {
        qubit_terms,
        constant,
        qubit_layout: layout,
    })
}

/// Qubit-register indices of the physical product basis, in row-major order
/// over `basis` (first dof slowest).
pub fn encoded_subspace(basis: &[BasisSpec], encoding: Encoding) -> Vec<usize> {
    let mut out = vec![0usize];
    for b in basis {
        let k = qubits_for(b, encoding);
        out = out
            .into_iter()
            .flat_map(|prefix| (0..b.nbas()).map(move |l| (prefix << k) | code(b, encoding, l)))
            .collect();
    }
    out
}

/// Direct Kronecker-product Hamiltonian over the physical levels.
pub fn dense_hamiltonian(terms: &[SymbolicTerm], basis: &[BasisSpec]) -> Result<DMatrix<Complex64>> {
    check_basis(basis)?;
    let dim: usize = basis.iter().map(BasisSpec::nbas).product();
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    for term in terms {
        let mut m = DMatrix::from_element(1, 1, Complex64::new(term.coefficient, 0.0));
        for b in basis {
            let factor = match term.factors.iter().find(|(_, d)| *d == b.dof) {
                Some((s, _)) => local_matrix(*s, b)?,
                None => DMatrix::identity(b.nbas(), b.nbas()),
            };
            m = m.kronecker(&factor);
        }
        for (_, d) in &term.factors {
            find_dof(basis, d)?;
        }
        h += m;
    }
    Ok(h)
}

/// Lifts a product of per-dof physical amplitude vectors into the qubit register.
pub fn encode_product_state(
    basis: &[BasisSpec],
    encoding: Encoding,
    factors: &[Vec<Complex64>],
) -> Result<Vec<Complex64>> {
    if factors.len() != basis.len() || factors.iter().zip(basis).any(|(f, b)| f.len() != b.nbas()) {
        return Err(Error::InvalidModel("initial state does not match the basis".into()));
    }
    let n: usize = basis.iter().map(|b| qubits_for(b, encoding)).sum();
    let mut psi = vec![ZERO; 1 << n];
    let sub = encoded_subspace(basis, encoding);
    let mut amps = vec![ONE];
    for f in factors {
        amps = amps.iter().flat_map(|a| f.iter().map(move |x| a * x)).collect();
    }
    for (idx, a) in sub.into_iter().zip(amps) {
        psi[idx] = a;
    }
    Ok(psi)
}

/// Layered product of `exp(−iθP_j)` over the encoded Pauli strings.
#[derive(Debug, Clone)]
pub struct Vha {
    pub n_qubits: usize,
    pub terms: Vec<PauliKey>,
    pub n_layers: usize,
    pub initial: Vec<Complex64>,
}

pub fn build_vha(enc: &EncodedHamiltonian, n_layers: usize, initial: Vec<Complex64>) -> Result<Vha> {
    if n_layers == 0 {
        return Err(Error::InvalidParams("the ansatz needs at least one layer".into()));
    }
    let n = enc.n_qubits();
    if initial.len() != 1 << n {
        return Err(Error::InvalidParams(format!(
            "initial state of length {} for {n} qubits",
            initial.len()
        )));
    }
    Ok(Vha {
        n_qubits: n,
        terms: enc.qubit_terms.raw_terms().map(|(k, _)| *k).collect(),
        n_layers,
        initial,
    })
}

fn apply_pauli(key: &PauliKey, v: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![ZERO; v.len()];
    for (b, a) in v.iter().enumerate() {
        let (t, ph) = key.apply_to_basis(b as u64);
        out[t as usize] = ph * a;
    }
    out
}

/// `v ← (cos θ − i sin θ P) v`, in place.
fn rotate(key: &PauliKey, theta: f64, v: &mut [Complex64]) {
    let (s, c) = theta.sin_cos();
    let ms = Complex64::new(0.0, -s);
    if key.x == 0 {
        for (b, a) in v.iter_mut().enumerate() {
            let (_, ph) = key.apply_to_basis(b as u64);
            *a *= c + ms * ph;
        }
        return;
    }
    let flip = key.x as usize;
    for b in 0..v.len() {
        let b2 = b ^ flip;
        if b2 < b {
            continue;
        }
        let (_, ph1) = key.apply_to_basis(b as u64);
        let (_, ph2) = key.apply_to_basis(b2 as u64);
        let (a1, a2) = (v[b], v[b2]);
        v[b2] = a2 * c + ms * ph1 * a1;
        v[b] = a1 * c + ms * ph2 * a2;
    }
}

impl Vha {
    pub fn n_params(&self) -> usize {
        self.n_layers * self.terms.len()
    }

    fn key(&self, k: usize) -> &PauliKey {
        &self.terms[k % self.terms.len()]
    }

    fn check(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.n_params() {
            return Err(Error::InvalidParams(format!(
                "{} angles for {} parameters",
                theta.len(),
                self.n_params()
            )));
        }
        Ok(())
    }

    pub fn state(&self, theta: &[f64]) -> Result<Vec<Complex64>> {
        self.check(theta)?;
        let mut v = self.initial.clone();
        for (k, &t) in theta.iter().enumerate() {
            rotate(self.key(k), t, &mut v);
        }
        Ok(v)
    }

    /// Column `k` is the state with `−iP_k` inserted right after factor `k`.
    pub fn jacobian(&self, theta: &[f64]) -> Result<DMatrix<Complex64>> {
        self.check(theta)?;
        let np = self.n_params();
        let mut partial = Vec::with_capacity(np);
        let mut v = self.initial.clone();
        for (k, &t) in theta.iter().enumerate() {
            rotate(self.key(k), t, &mut v);
            partial.push(v.clone());
        }
        let cols: Vec<Vec<Complex64>> = (0..np)
            .into_par_iter()
            .map(|k| {
                let mut col: Vec<Complex64> = apply_pauli(self.key(k), &partial[k])
                    .into_iter()
                    .map(|x| -I * x)
                    .collect();
                for (j, &t) in theta.iter().enumerate().skip(k + 1) {
                    rotate(self.key(j), t, &mut col);
                }
                col
            })
            .collect();
        let dim = self.initial.len();
        Ok(DMatrix::from_fn(dim, np, |i, k| cols[k][i]))
    }
}

/// `M θ̇ = V` with its regularization strength.
#[derive(Debug, Clone, PartialEq)]
pub struct EomSystem {
    pub m: DMatrix<f64>,
    pub v: DVector<f64>,
    pub epsilon_reg: f64,
}

/// `M = Re(J†J)`, `V = Im(J† H ψ)`.
pub fn assemble_eom(jac: &DMatrix<Complex64>, state: &[Complex64], h: &DMatrix<Complex64>) -> EomSystem {
    let jd = jac.adjoint();
    let m = (&jd * jac).map(|c| c.re);
    let hpsi = h * DVector::from_column_slice(state);
    let v = (&jd * hpsi).map(|c| c.im);
    EomSystem {
        m,
        v,
        epsilon_reg: DEFAULT_EPSILON_REG,
    }
}

/// Solves with eigenvalues shifted to `λ + ε e^{−λ/ε}`.
pub fn solve_thetadot(sys: &EomSystem) -> DVector<f64> {
    let eps = sys.epsilon_reg;
    let sym = (&sys.m + sys.m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let q = &eig.eigenvectors;
    let proj = q.transpose() * &sys.v;
    let scaled = DVector::from_fn(proj.len(), |i, _| {
        let l = eig.eigenvalues[i];
        proj[i] / (l + eps * (-l / eps).exp())
    });
    q * scaled
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrator {
    Euler,
    Rk4,
}

/// Sampled trajectory: one row per time point.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub thetas: Vec<Vec<f64>>,
    pub observables: Vec<Vec<f64>>,
}

fn observe(psi: &[Complex64], obs: &[DMatrix<Complex64>]) -> Vec<f64> {
    let v = DVector::from_column_slice(psi);
    obs.iter().map(|o| (v.adjoint() * o * &v)[(0, 0)].re).collect()
}

/// Integrates `θ̇ = M⁻¹V` with a fixed step from `t = 0` to `t_final`.
/// `h` is the dense Hamiltonian used in the equation of motion.
pub fn time_evolve(
    h: &DMatrix<Complex64>,
    ansatz: &Vha,
    theta0: &[f64],
    t_final: f64,
    tau: f64,
    integrator: Integrator,
    observables: &[DMatrix<Complex64>],
) -> Result<Trajectory> {
    if tau <= 0.0 || tau.is_nan() || t_final < 0.0 {
        return Err(Error::InvalidParams(format!(
            "bad time grid: tau {tau}, t_final {t_final}"
        )));
    }
    let deriv = |theta: &[f64]| -> Result<Vec<f64>> {
        let psi = ansatz.state(theta)?;
        let jac = ansatz.jacobian(theta)?;
        Ok(solve_thetadot(&assemble_eom(&jac, &psi, h)).as_slice().to_vec())
    };
    let n_steps = (t_final / tau).round() as usize;
    let mut theta = theta0.to_vec();
    let mut traj = Trajectory {
        times: vec![0.0],
        thetas: vec![theta.clone()],
        observables: vec![observe(&ansatz.state(&theta)?, observables)],
    };
    let axpy = |a: &[f64], s: f64, b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + s * y).collect() };
    for step in 1..=n_steps {
        theta = match integrator {
            Integrator::Euler => axpy(&theta, tau, &deriv(&theta)?),
            Integrator::Rk4 => {
                let k1 = deriv(&theta)?;
                let k2 = deriv(&axpy(&theta, 0.5 * tau, &k1))?;
                let k3 = deriv(&axpy(&theta, 0.5 * tau, &k2))?;
                let k4 = deriv(&axpy(&theta, tau, &k3))?;
                theta
                    .iter()
                    .enumerate()
                    .map(|(i, x)| x + tau / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
                    .collect()
            }
        };
        if theta.iter().any(|x| !x.is_finite()) {
            return Err(Error::NumericalBlowup { step });
        }
        traj.times.push(step as f64 * tau);
        traj.observables.push(observe(&ansatz.state(&theta)?, observables));
        traj.thetas.push(theta.clone());
    }
    Ok(traj)
}

/// `e^{−iHt} ψ0` for every `t` by eigendecomposition.
pub fn exact_propagate(h: &DMatrix<Complex64>, psi0: &[Complex64], t_grid: &[f64]) -> Result<Vec<Vec<Complex64>>> {
    let dim = h.nrows();
    if dim > EXACT_DIM_LIMIT {
        return Err(Error::SizeLimit(format!(
            "dimension {dim} exceeds {EXACT_DIM_LIMIT} for exact propagation"
        )));
    }
    if psi0.len() != dim {
        return Err(Error::InvalidParams(format!(
            "state of length {} for dimension {dim}",
            psi0.len()
        )));
    }
    let herm = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let u = &eig.eigenvectors;
    let c0 = u.adjoint() * DVector::from_column_slice(psi0);
    Ok(t_grid
        .iter()
        .map(|&t| {
            let ct = DVector::from_fn(dim, |i, _| c0[i] * Complex64::from_polar(1.0, -eig.eigenvalues[i] * t));
            (u * ct).as_slice().to_vec()
        })
        .collect())
}

/// Expectation of a dense observable along a list of states.
pub fn observable_series(states: &[Vec<Complex64>], obs: &DMatrix<Complex64>) -> Vec<f64> {
    states
        .iter()
        .map(|s| observe(s, std::slice::from_ref(obs))[0])
        .collect()
}

/// A model ready for encoding: terms, basis and a product initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsModel {
    pub terms: Vec<SymbolicTerm>,
    pub basis: Vec<BasisSpec>,
    /// Physical-level amplitudes per dof, in basis order.
    pub initial: Vec<Vec<Complex64>>,
}

impl DynamicsModel {
    pub fn encode(&self, encoding: Encoding) -> Result<EncodedHamiltonian> {
        qubit_encode(&self.terms, &self.basis, encoding)
    }

    pub fn initial_state(&self, encoding: Encoding) -> Result<Vec<Complex64>> {
        encode_product_state(&self.basis, encoding, &self.initial)
    }

    /// Dense `sigma_z` on the given spin dof, in the encoded register.
    pub fn sigma_z(&self, dof: &str, encoding: Encoding) -> Result<DMatrix<Complex64>> {
        qubit_encode(
            &[SymbolicTerm::new(&[(Symbol::SigmaZ, dof)], 1.0)],
            &self.basis,
            encoding,
        )?
        .to_dense()
    }
}

fn ground(nbas: usize) -> Vec<Complex64> {
    let mut v = vec![ZERO; nbas];
    v[0] = ONE;
    v
}

/// `(ε/2)σ_z + Δσ_x + ωb†b + gσ_z(b†+b)`, spin up and oscillator in its ground state.
pub fn spin_boson_model(epsilon: f64, delta: f64, omega: f64, g: f64, nbas: usize) -> Result<DynamicsModel> {
    if nbas < 2 {
        return Err(Error::InvalidModel("spin-boson model needs nbas ≥ 2".into()));
    }
    Ok(DynamicsModel {
        terms: vec![
            SymbolicTerm::new(&[(Symbol::SigmaZ, "spin")], epsilon / 2.0),
            SymbolicTerm::new(&[(Symbol::SigmaX, "spin")], delta),
            SymbolicTerm::new(&[(Symbol::BDagB, "boson")], omega),
            SymbolicTerm::new(&[(Symbol::SigmaZ, "spin"), (Symbol::BDagPlusB, "boson")], g),
        ],
        basis: vec![BasisSpec::half_spin("spin"), BasisSpec::sho("boson", omega, nbas)],
        initial: vec![vec![ONE, ZERO], ground(nbas)],
    })
}

/// Coherent state `|α⟩` truncated to `nbas` levels and renormalized.
pub fn coherent_state(alpha: f64, nbas: usize) -> Vec<Complex64> {
    let mut v = Vec::with_capacity(nbas);
    let mut term = 1.0;
    for n in 0..nbas {
        if n > 0 {
            term *= alpha / (n as f64).sqrt();
        }
        v.push(term);
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| Complex64::new(x / norm, 0.0)).collect()
}

/// Two-site charge transfer with one local mode per site,
/// `−V(a†₀a₁ + h.c.) + ΔG n₁ + ω Σ b†ᵢbᵢ + gω Σ nᵢ(b†ᵢ + bᵢ)`, in the
/// one-charge sector: `σ_z = +1` is the charge on site 0, so `n₀ = (1 + σ_z)/2`.
/// Starts with the charge on site 0 and its mode relaxed to the displaced
/// ground state (coherent state at `−g`).
pub fn marcus_model(v: f64, dg: f64, omega: f64, g: f64, nbas: usize) -> Result<DynamicsModel> {
    if nbas < 2 {
        return Err(Error::InvalidModel("Marcus model needs nbas ≥ 2".into()));
    }
    let c = "charge";
    let half = 0.5 * g * omega;
    let terms = vec![
        SymbolicTerm::new(&[(Symbol::SigmaX, c)], -v),
        SymbolicTerm::constant(0.5 * dg),
        SymbolicTerm::new(&[(Symbol::SigmaZ, c)], -0.5 * dg),
        SymbolicTerm::new(&[(Symbol::BDagB, "mode0")], omega),
        SymbolicTerm::new(&[(Symbol::BDagB, "mode1")], omega),
        SymbolicTerm::new(&[(Symbol::BDagPlusB, "mode0")], half),
        SymbolicTerm::new(&[(Symbol::SigmaZ, c), (Symbol::BDagPlusB, "mode0")], half),
        SymbolicTerm::new(&[(Symbol::BDagPlusB, "mode1")], half),
        SymbolicTerm::new(&[(Symbol::SigmaZ, c), (Symbol::BDagPlusB, "mode1")], -half),
    ];
    Ok(DynamicsModel {
        terms,
        basis: vec![
            BasisSpec::half_spin(c),
            BasisSpec::sho("mode0", omega, nbas),
            BasisSpec::sho("mode1", omega, nbas),
        ],
        initial: vec![vec![ONE, ZERO], coherent_state(-g, nbas), ground(nbas)],
    })
}

/// `k = V²√(πβ/λ) exp(−β(λ + ΔG)²/4λ)` with ħ = 1.
pub fn marcus_rate_theory(v: f64, lambda: f64, dg: f64, beta: f64) -> Result<f64> {
    if lambda <= 0.0 || beta <= 0.0 {
        return Err(Error::InvalidParams("λ and β must be positive".into()));
    }
    Ok(v * v * (std::f64::consts::PI * beta / lambda).sqrt() * (-beta * (lambda + dg).powi(2) / (4.0 * lambda)).exp())
}

/// Negated least-squares slope of `values` against `times` over `window`.
pub fn rate_fit(times: &[f64], values: &[f64], window: (f64, f64)) -> Result<f64> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|(t, _)| **t >= window.0 - 1e-12 && **t <= window.1 + 1e-12)
        .map(|(t, v)| (*t, *v))
        .collect();
    if pts.len() < 3 {
        return Err(Error::FitError(format!("{} samples in the fit window", pts.len())));
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mv = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let stt: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    if stt <= 0.0 {
        return Err(Error::FitError("all samples share one time".into()));
    }
    let stv: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - mv)).sum();
    Ok(-stv / stt)
}

/// Least-squares `β` for the Marcus formula against simulated rates, by
/// golden-section search on `β ∈ [lo, hi]`.
pub fn fit_marcus_beta(v: f64, lambda: f64, dgs: &[f64], rates: &[f64], lo: f64, hi: f64) -> Result<f64> {
    let cost = |beta: f64| -> Result<f64> {
        let mut s = 0.0;
        for (dg, k) in dgs.iter().zip(rates) {
            s += (marcus_rate_theory(v, lambda, *dg, beta)? - k).powi(2);
        }
        Ok(s)
    };
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        let c = b - phi * (b - a);
        let d = a + phi * (b - a);
        if cost(c)? < cost(d)? {
            b = d;
        } else {
            a = c;
        }
    }
    Ok(0.5 * (a + b))
}
