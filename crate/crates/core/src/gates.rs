//! Gate-level statevector and density-matrix simulation with Kraus noise,
//! shot sampling and parameter-shift gradients.
//!
//! Qubit `q` of an `n`-qubit register is bit `n - 1 - q` of a basis index, so
//! qubit 0 is the leftmost character of a bitstring. `RY(θ) = exp(−iθY/2)`
//! and `PauliRot(P, φ) = exp(−iφP)`; the latter is the `e^{φR}` form with
//! `R = −iP`, `R² = −I`.

use std::f64::consts::PI;
use std::fmt;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::ansatz::UCCProblem;
use crate::civector::{CISpace, Excitation};
use crate::operator::{jordan_wigner, FermionOperator, Ladder, Pauli, PauliKey, QubitOperator};
use crate::optimize::{lbfgs, nelder_mead, LbfgsOptions, NelderMeadOptions};
use crate::vqe::OptResult;
use crate::{Error, Result};

/// Largest register simulated as a density matrix.
pub const DENSITY_QUBIT_LIMIT: usize = 10;
/// Largest register simulated as a statevector.
pub const STATE_QUBIT_LIMIT: usize = 26;
/// Largest register accepted by the Trotter compiler.
pub const TROTTER_QUBIT_LIMIT: usize = 12;

const TP_TOL: f64 = 1e-10;

fn cplx(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    X,
    Ry,
    Cnot,
    /// One letter per entry of the gate's qubit list.
    PauliRot(Vec<Pauli>),
}

/// Kind label used to bind noise channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateTag {
    X,
    Ry,
    Cnot,
    PauliRot,
}

impl std::str::FromStr for GateTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "X" => Ok(GateTag::X),
            "RY" => Ok(GateTag::Ry),
            "CNOT" | "CX" => Ok(GateTag::Cnot),
            "PAULIROT" => Ok(GateTag::PauliRot),
            _ => Err(Error::InvalidChannel(format!("unknown gate kind {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    Fixed(f64),
    Slot(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub angle: Option<Angle>,
}

impl Gate {
    pub fn x(q: usize) -> Self {
        Self {
            kind: GateKind::X,
            qubits: vec![q],
            angle: None,
        }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self {
            kind: GateKind::Cnot,
            qubits: vec![control, target],
            angle: None,
        }
    }

    pub fn ry(q: usize, angle: Angle) -> Self {
        Self {
            kind: GateKind::Ry,
            qubits: vec![q],
            angle: Some(angle),
        }
    }

    pub fn pauli_rot(letters: &[(usize, Pauli)], angle: Angle) -> Self {
        Self {
            kind: GateKind::PauliRot(letters.iter().map(|l| l.1).collect()),
            qubits: letters.iter().map(|l| l.0).collect(),
            angle: Some(angle),
        }
    }

    pub fn tag(&self) -> GateTag {
        match self.kind {
            GateKind::X => GateTag::X,
            GateKind::Ry => GateTag::Ry,
            GateKind::Cnot => GateTag::Cnot,
            GateKind::PauliRot(_) => GateTag::PauliRot,
        }
    }

    pub fn slot(&self) -> Option<usize> {
        match self.angle {
            Some(Angle::Slot(s)) => Some(s),
            _ => None,
        }
    }

    fn resolve(&self, params: &[f64]) -> f64 {
        match self.angle {
            Some(Angle::Fixed(a)) => a,
            Some(Angle::Slot(s)) => params[s],
            None => 0.0,
        }
    }

    fn pauli_key(&self, n: usize) -> PauliKey {
        let mut key = PauliKey::default();
        if let GateKind::PauliRot(letters) = &self.kind {
            for (&q, &p) in self.qubits.iter().zip(letters) {
                let bit = 1u64 << (n - 1 - q);
                match p {
                    Pauli::X => key.x |= bit,
                    Pauli::Y => {
                        key.x |= bit;
                        key.z |= bit;
                    }
                    Pauli::Z => key.z |= bit,
                }
            }
        }
        key
    }

    /// Applies the gate at the given angle to a statevector.
    fn apply(&self, n: usize, angle: f64, v: &mut [Complex64]) {
        let bit = |q: usize| 1usize << (n - 1 - q);
        match &self.kind {
            GateKind::X => {
                let b = bit(self.qubits[0]);
                for i in 0..v.len() {
                    if i & b == 0 {
                        v.swap(i, i | b);
                    }
                }
            }
            GateKind::Cnot => {
                let (cb, tb) = (bit(self.qubits[0]), bit(self.qubits[1]));
                for i in 0..v.len() {
                    if i & cb != 0 && i & tb == 0 {
                        v.swap(i, i | tb);
                    }
                }
            }
            GateKind::Ry => {
                let b = bit(self.qubits[0]);
                let (s, co) = (0.5 * angle).sin_cos();
                for i in 0..v.len() {
                    if i & b == 0 {
                        let (a0, a1) = (v[i], v[i | b]);
                        v[i] = a0 * co - a1 * s;
                        v[i | b] = a0 * s + a1 * co;
                    }
                }
            }
            GateKind::PauliRot(_) => {
                let key = self.pauli_key(n);
                let (s, co) = angle.sin_cos();
                let old = v.to_vec();
                let mis = Complex64::new(0.0, -s);
                for (b, a) in old.iter().enumerate() {
                    let (t, ph) = key.apply_to_basis(b as u64);
                    v[t as usize] += mis * ph * a;
                }
                for (x, o) in v.iter_mut().zip(&old) {
                    *x -= o * (1.0 - co);
                }
            }
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let angle = |a: Option<Angle>| match a {
            Some(Angle::Slot(s)) => format!("slot{s}"),
            Some(Angle::Fixed(x)) => format!("{x:e}"),
            None => String::new(),
        };
        match &self.kind {
            GateKind::X => write!(f, "X q{}", self.qubits[0]),
            GateKind::Cnot => write!(f, "CNOT q{} q{}", self.qubits[0], self.qubits[1]),
            GateKind::Ry => write!(f, "RY q{} {}", self.qubits[0], angle(self.angle)),
            GateKind::PauliRot(letters) => {
                let body: Vec<String> = self
                    .qubits
                    .iter()
                    .zip(letters)
                    .map(|(q, p)| format!("{}{q}", p.symbol()))
                    .collect();
                write!(f, "PAULIROT {} {}", body.join(","), angle(self.angle))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
    pub n_params: usize,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            gates: Vec::new(),
            n_params: 0,
        }
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        let arity_ok = match &gate.kind {
            GateKind::X | GateKind::Ry => gate.qubits.len() == 1,
            GateKind::Cnot => gate.qubits.len() == 2,
            GateKind::PauliRot(l) => !l.is_empty() && l.len() == gate.qubits.len(),
        };
        if !arity_ok {
            return Err(Error::InvalidOperator(format!("wrong qubit count for {gate}")));
        }
        for (k, &q) in gate.qubits.iter().enumerate() {
            if q >= self.n_qubits {
                return Err(Error::InvalidOperator(format!(
                    "qubit {q} out of range for {} qubits",
                    self.n_qubits
                )));
            }
            if gate.qubits[..k].contains(&q) {
                return Err(Error::InvalidOperator(format!("qubit {q} repeated in one gate")));
            }
        }
        if let Some(s) = gate.slot() {
            self.n_params = self.n_params.max(s + 1);
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| g.kind == GateKind::Cnot).count()
    }

    fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params {
            return Err(Error::InvalidParams(format!(
                "{} parameters given, circuit has {}",
                params.len(),
                self.n_params
            )));
        }
        Ok(())
    }

    /// Parses one gate per line: `X q1`, `CNOT q0 q1`, `RY q0 slot3`,
    /// `RY q0 0.5`, `PAULIROT X0,Y1 slot2`.
    pub fn parse(n_qubits: usize, text: &str) -> Result<Self> {
        let mut circ = Self::new(n_qubits);
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| Error::Parse { line: lineno + 1, msg };
            let toks: Vec<&str> = line.split_whitespace().collect();
            let qubit = |t: &str| -> Result<usize> {
                t.strip_prefix('q')
                    .and_then(|d| d.parse().ok())
                    .ok_or_else(|| err(format!("bad qubit {t:?}")))
            };
            let angle = |t: &str| -> Result<Angle> {
                if let Some(s) = t.strip_prefix("slot") {
                    s.parse().map(Angle::Slot).map_err(|_| err(format!("bad slot {t:?}")))
                } else {
                    t.parse().map(Angle::Fixed).map_err(|_| err(format!("bad angle {t:?}")))
                }
            };
            let gate = match (toks[0].to_ascii_uppercase().as_str(), toks.len()) {
                ("X", 2) => Gate::x(qubit(toks[1])?),
                ("CNOT", 3) => Gate::cnot(qubit(toks[1])?, qubit(toks[2])?),
                ("RY", 3) => Gate::ry(qubit(toks[1])?, angle(toks[2])?),
                ("PAULIROT", 3) => {
                    let mut letters = Vec::new();
                    for l in toks[1].split(',') {
                        let p = match l.chars().next() {
                            Some('X') => Pauli::X,
                            Some('Y') => Pauli::Y,
                            Some('Z') => Pauli::Z,
                            _ => return Err(err(format!("bad Pauli letter in {l:?}"))),
                        };
                        let q = l[1..].parse().map_err(|_| err(format!("bad qubit in {l:?}")))?;
                        letters.push((q, p));
                    }
                    Gate::pauli_rot(&letters, angle(toks[2])?)
                }
                _ => return Err(err(format!("unrecognized gate line {line:?}"))),
            };
            circ.push(gate).map_err(|e| err(e.to_string()))?;
        }
        Ok(circ)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

/// Initial RY layer followed by `n_layers` of (CNOT ladder, RY layer).
pub fn build_ry_ansatz(n_qubits: usize, n_layers: usize) -> Circuit {
    let mut circ = Circuit::new(n_qubits);
    let mut slot = 0;
    let mut ry_layer = |circ: &mut Circuit| {
        for q in 0..n_qubits {
            circ.push(Gate::ry(q, Angle::Slot(slot))).expect("qubit in range");
            slot += 1;
        }
    };
    ry_layer(&mut circ);
    for _ in 0..n_layers {
        for q in 0..n_qubits.saturating_sub(1) {
            circ.push(Gate::cnot(q, q + 1)).expect("qubit in range");
        }
        ry_layer(&mut circ);
    }
    circ
}

/// Qubits set in the Hartree–Fock state after the two-qubit-reduced parity
/// mapping of `n_orb` spatial orbitals with `n_elec` electrons.
pub fn parity_reduced_hf_qubits(n_orb: usize, n_elec: usize) -> Result<Vec<usize>> {
    if !n_elec.is_multiple_of(2) || n_orb < 2 || n_elec > 2 * n_orb {
        return Err(Error::UnsupportedReduction(format!(
            "no reduced parity reference for {n_elec} electrons in {n_orb} orbitals"
        )));
    }
    let n = 2 * n_orb;
    let n_occ = n_elec / 2;
    let occupied = |j: usize| (j % n_orb) < n_occ;
    let mut bits = Vec::new();
    let mut parity = false;
    for j in 0..n {
        parity ^= occupied(j);
        if j != n_orb - 1 && j != n - 1 {
            bits.push(parity);
        }
    }
    let nq = n - 2;
    Ok((0..nq).filter(|&b| bits[b]).map(|b| nq - 1 - b).collect())
}

/// Parameters for [`build_ry_ansatz`] that prepare the basis state with
/// the given qubits set, compensating for each CNOT ladder.
pub fn ry_reference_params(n_qubits: usize, n_layers: usize, set: &[usize]) -> Vec<f64> {
    let target: Vec<bool> = (0..n_qubits).map(|q| set.contains(&q)).collect();
    let mut state = target.clone();
    let mut params: Vec<f64> = target.iter().map(|&b| if b { PI } else { 0.0 }).collect();
    for _ in 0..n_layers {
        for q in 0..n_qubits.saturating_sub(1) {
            if state[q] {
                state[q + 1] = !state[q + 1];
            }
        }
        for q in 0..n_qubits {
            params.push(if state[q] != target[q] { PI } else { 0.0 });
        }
        state.clone_from(&target);
    }
    params
}

pub fn simulate_state(c: &Circuit, params: &[f64]) -> Result<Vec<Complex64>> {
    c.check_params(params)?;
    if c.n_qubits > STATE_QUBIT_LIMIT {
        return Err(Error::SizeLimit(format!(
            "{} qubits exceeds the statevector limit",
            c.n_qubits
        )));
    }
    let mut v = vec![cplx(0.0); 1 << c.n_qubits];
    v[0] = cplx(1.0);
    for g in &c.gates {
        g.apply(c.n_qubits, g.resolve(params), &mut v);
    }
    Ok(v)
}

/// Kraus channels keyed by gate kind, each acting on the gate's own qubits.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NoiseModel {
    channels: Vec<(GateTag, Vec<DMatrix<Complex64>>)>,
}

impl NoiseModel {
    pub fn new() -> Self {
        Self::default()
    }

    /// Binds `kraus` after every gate of kind `tag`, replacing any earlier binding.
    pub fn add(&mut self, tag: GateTag, kraus: Vec<DMatrix<Complex64>>) -> Result<()> {
        check_trace_preserving(&kraus)?;
        self.channels.retain(|(t, _)| *t != tag);
        self.channels.push((tag, kraus));
        Ok(())
    }

    pub fn channel(&self, tag: GateTag) -> Option<&[DMatrix<Complex64>]> {
        self.channels.iter().find(|(t, _)| *t == tag).map(|(_, k)| k.as_slice())
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    /// Two-qubit depolarizing noise with probability `p` after every CNOT.
    pub fn cnot_depolarizing(p: f64) -> Result<Self> {
        let mut m = Self::new();
        m.add(GateTag::Cnot, depolarizing_channel(p, 2)?)?;
        Ok(m)
    }
}

fn check_trace_preserving(kraus: &[DMatrix<Complex64>]) -> Result<()> {
    let d = kraus
        .first()
        .ok_or_else(|| Error::InvalidChannel("empty Kraus list".into()))?
        .nrows();
    if !d.is_power_of_two() || d < 2 {
        return Err(Error::InvalidChannel(format!(
            "Kraus dimension {d} is not a qubit dimension"
        )));
    }
    let mut sum = DMatrix::<Complex64>::zeros(d, d);
    for k in kraus {
        if k.shape() != (d, d) {
            return Err(Error::InvalidChannel("Kraus operators differ in shape".into()));
        }
        sum += k.adjoint() * k;
    }
    let dev = (sum - DMatrix::identity(d, d))
        .iter()
        .fold(0.0f64, |m, x| m.max(x.norm()));
    if dev > TP_TOL {
        return Err(Error::InvalidChannel(format!(
            "channel is not trace preserving (deviation {dev:.3e})"
        )));
    }
    Ok(())
}

fn pauli_matrix(letters: &[Option<Pauli>]) -> DMatrix<Complex64> {
    let mut m = DMatrix::from_element(1, 1, cplx(1.0));
    for l in letters {
        let p = match l {
            None => DMatrix::identity(2, 2),
            Some(p) => {
                let a = p.matrix();
                DMatrix::from_fn(2, 2, |i, j| a[i][j])
            }
        };
        m = m.kronecker(&p);
    }
    m
}

/// `(1−p)ρ + p/(4^n−1) Σ_P PρP` as Kraus operators, identity first.
pub fn depolarizing_channel(p: f64, n_qubits: usize) -> Result<Vec<DMatrix<Complex64>>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    if !(1..=2).contains(&n_qubits) {
        return Err(Error::InvalidChannel(format!(
            "depolarizing channel on {n_qubits} qubits"
        )));
    }
    let letters = [None, Some(Pauli::X), Some(Pauli::Y), Some(Pauli::Z)];
    let n_terms = 4usize.pow(n_qubits as u32);
    let w = (p / (n_terms - 1) as f64).sqrt();
    let mut out = Vec::with_capacity(n_terms);
    for k in 0..n_terms {
        let combo: Vec<Option<Pauli>> = (0..n_qubits).rev().map(|j| letters[(k >> (2 * j)) & 3]).collect();
        let weight = if k == 0 { (1.0 - p).sqrt() } else { w };
        out.push(pauli_matrix(&combo) * cplx(weight));
    }
    Ok(out)
}

/// Average fidelity over Haar-random pure inputs, `(Σ|Tr K|² + d)/(d(d+1))`.
pub fn average_gate_fidelity(kraus: &[DMatrix<Complex64>]) -> f64 {
    let d = kraus.first().map_or(1, |k| k.nrows()) as f64;
    let s: f64 = kraus.iter().map(|k| k.trace().norm_sqr()).sum();
    (s + d) / (d * (d + 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub n_qubits: usize,
    pub entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn from_state(psi: &[Complex64]) -> Self {
        let n_qubits = psi.len().trailing_zeros() as usize;
        let v = DMatrix::from_column_slice(psi.len(), 1, psi);
        Self {
            n_qubits,
            entries: &v * v.adjoint(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        (&self.entries - self.entries.adjoint())
            .iter()
            .fold(0.0, |m, x| m.max(x.norm()))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.entries + self.entries.adjoint()) * cplx(0.5);
        herm.symmetric_eigenvalues().min()
    }

    /// Reduced state of the listed qubits, in list order.
    pub fn partial_trace_keep(&self, keep: &[usize]) -> DMatrix<Complex64> {
        let n = self.n_qubits;
        let dk = 1 << keep.len();
        let local = |b: usize| {
            keep.iter()
                .fold(0usize, |acc, &q| (acc << 1) | ((b >> (n - 1 - q)) & 1))
        };
        let mask: usize = keep.iter().map(|&q| 1usize << (n - 1 - q)).sum();
        let mut out = DMatrix::zeros(dk, dk);
        let dim = 1 << n;
        for i in 0..dim {
            for j in 0..dim {
                if i & !mask == j & !mask {
                    out[(local(i), local(j))] += self.entries[(i, j)];
                }
            }
        }
        out
    }
}

/// Applies a `2^k × 2^k` matrix on `qubits` (first qubit most significant) to `v`.
fn apply_local(m: &DMatrix<Complex64>, qubits: &[usize], n: usize, v: &mut [Complex64]) {
    let k = qubits.len();
    let bits: Vec<usize> = qubits.iter().map(|&q| 1usize << (n - 1 - q)).collect();
    let mask: usize = bits.iter().sum();
    let offsets: Vec<usize> = (0..1usize << k)
        .map(|l| (0..k).filter(|&j| l >> (k - 1 - j) & 1 == 1).map(|j| bits[j]).sum())
        .collect();
    let mut buf = vec![cplx(0.0); 1 << k];
    for base in 0..v.len() {
        if base & mask != 0 {
            continue;
        }
        for (l, &o) in offsets.iter().enumerate() {
            buf[l] = v[base | o];
        }
        for (r, &o) in offsets.iter().enumerate() {
            v[base | o] = (0..buf.len()).map(|s| m[(r, s)] * buf[s]).sum();
        }
    }
}

fn map_columns(rho: &mut DMatrix<Complex64>, f: impl Fn(&mut [Complex64]) + Sync) {
    let dim = rho.nrows();
    rho.as_mut_slice().par_chunks_mut(dim).for_each(&f);
}

/// `A ρ A†` where `apply` maps a column vector `x ↦ A x`.
fn conjugate(rho: &DMatrix<Complex64>, apply: impl Fn(&mut [Complex64]) + Sync) -> DMatrix<Complex64> {
    let mut a = rho.clone();
    map_columns(&mut a, &apply);
    let mut b = a.adjoint();
    map_columns(&mut b, &apply);
    b
}

pub fn simulate_density(c: &Circuit, params: &[f64], noise: &NoiseModel) -> Result<DensityMatrix> {
    c.check_params(params)?;
    let n = c.n_qubits;
    if n > DENSITY_QUBIT_LIMIT {
        return Err(Error::SizeLimit(format!(
            "{n} qubits exceeds the density-matrix limit of {DENSITY_QUBIT_LIMIT}"
        )));
    }
    let dim = 1 << n;
    let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
    rho[(0, 0)] = self::cplx(1.0);
    for g in &c.gates {
        let angle = g.resolve(params);
        rho = conjugate(&rho, |col| g.apply(n, angle, col));
        if let Some(kraus) = noise.channel(g.tag()) {
            if kraus[0].nrows() != 1 << g.qubits.len() {
                return Err(Error::InvalidChannel(format!(
                    "{}-dimensional channel bound to a {}-qubit gate",
                    kraus[0].nrows(),
                    g.qubits.len()
                )));
            }
            let mut acc = DMatrix::<Complex64>::zeros(dim, dim);
            for k in kraus {
                acc += conjugate(&rho, |col| apply_local(k, &g.qubits, n, col));
            }
            rho = acc;
        }
    }
    Ok(DensityMatrix {
        n_qubits: n,
        entries: rho,
    })
}

/// A simulated register, pure or mixed.
#[derive(Debug, Clone, PartialEq)]
pub enum SimState {
    Pure(Vec<Complex64>),
    Mixed(DensityMatrix),
}

impl SimState {
    pub fn n_qubits(&self) -> usize {
        match self {
            SimState::Pure(v) => v.len().trailing_zeros() as usize,
            SimState::Mixed(r) => r.n_qubits,
        }
    }

    /// `⟨P⟩` for a Hermitian Pauli string.
    fn pauli_expectation(&self, key: &PauliKey) -> Complex64 {
        match self {
            SimState::Pure(v) => v
                .iter()
                .enumerate()
                .map(|(b, a)| {
                    let (t, ph) = key.apply_to_basis(b as u64);
                    v[t as usize].conj() * ph * a
                })
                .sum(),
            SimState::Mixed(r) => (0..r.entries.nrows())
                .map(|b| {
                    let (t, ph) = key.apply_to_basis(b as u64);
                    r.entries[(b, t as usize)] * ph
                })
                .sum(),
        }
    }
}

fn check_size(state: &SimState, h: &QubitOperator) -> Result<()> {
    if state.n_qubits() != h.n_qubits() {
        return Err(Error::InvalidOperator(format!(
            "{}-qubit operator on a {}-qubit state",
            h.n_qubits(),
            state.n_qubits()
        )));
    }
    Ok(())
}

pub fn expectation(state: &SimState, h: &QubitOperator) -> Result<f64> {
    check_size(state, h)?;
    let total: Complex64 = h.raw_terms().map(|(k, a)| a * state.pauli_expectation(k)).sum();
    if total.im.abs() > 1e-9 {
        return Err(Error::InvalidOperator(format!(
            "expectation has imaginary part {:.3e}; operator is not Hermitian",
            total.im
        )));
    }
    Ok(total.re)
}

/// Estimates `⟨H⟩` by sampling every non-identity Pauli term independently
/// with `shots` binary outcomes.
pub fn sampled_expectation(state: &SimState, h: &QubitOperator, shots: u64, seed: u64) -> Result<f64> {
    check_size(state, h)?;
    if shots == 0 {
        return Err(Error::InvalidParams("at least one shot is needed".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0.0;
    for (k, a) in h.raw_terms() {
        if k.is_identity() {
            total += a.re;
            continue;
        }
        let e = state.pauli_expectation(k).re.clamp(-1.0, 1.0);
        let hits = Binomial::new(shots, 0.5 * (1.0 + e))
            .map_err(|e| Error::InvalidParams(e.to_string()))?
            .sample(&mut rng);
        total += a.re * (2.0 * hits as f64 / shots as f64 - 1.0);
    }
    Ok(total)
}

/// Measurement settings for sampled energies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shots {
    pub per_term: u64,
    pub seed: u64,
}

/// Circuit energy, exact or sampled, under optional noise.
pub fn circuit_energy(
    c: &Circuit,
    params: &[f64],
    h: &QubitOperator,
    noise: Option<&NoiseModel>,
    shots: Option<Shots>,
) -> Result<f64> {
    let state = match noise {
        Some(nm) if !nm.is_empty() => SimState::Mixed(simulate_density(c, params, nm)?),
        _ => SimState::Pure(simulate_state(c, params)?),
    };
    match shots {
        Some(s) => sampled_expectation(&state, h, s.per_term, s.seed),
        None => expectation(&state, h),
    }
}

/// Shift and weight for a rotation: RY moves its own angle by ±π/2 with
/// weight ½; `PauliRot = e^{φR}` moves by ±π/4 with weight 1.
fn shift_rule(kind: &GateKind) -> Option<(f64, f64)> {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
    match kind {
        GateKind::Ry => Some((FRAC_PI_2, 0.5)),
        GateKind::PauliRot(_) => Some((FRAC_PI_4, 1.0)),
        _ => None,
    }
}

fn slot_gates(c: &Circuit) -> Result<Vec<usize>> {
    let mut owner = vec![None; c.n_params];
    for (i, g) in c.gates.iter().enumerate() {
        if let Some(s) = g.slot() {
            if owner[s].replace(i).is_some() {
                return Err(Error::SharedParameterUnsupported(s));
            }
        }
    }
    owner
        .into_iter()
        .enumerate()
        .map(|(s, o)| o.ok_or_else(|| Error::InvalidParams(format!("parameter slot {s} is unused"))))
        .collect()
}

/// Gradient by two shifted evaluations per parameter. With shots, each
/// evaluation draws from its own seed derived from `shots.seed`.
pub fn parameter_shift_gradient(
    c: &Circuit,
    params: &[f64],
    h: &QubitOperator,
    noise: Option<&NoiseModel>,
    shots: Option<Shots>,
) -> Result<Vec<f64>> {
    c.check_params(params)?;
    let owners = slot_gates(c)?;
    owners
        .par_iter()
        .enumerate()
        .map(|(s, &gi)| {
            let (shift, weight) = shift_rule(&c.gates[gi].kind).expect("slot gates are rotations");
            let eval = |delta: f64, k: u64| {
                let mut x = params.to_vec();
                x[s] += delta;
                let sh = shots.map(|sh| Shots {
                    per_term: sh.per_term,
                    seed: sh.seed.wrapping_add(2 * s as u64 + k),
                });
                circuit_energy(c, &x, h, noise, sh)
            };
            Ok(weight * (eval(shift, 0)? - eval(-shift, 1)?))
        })
        .collect()
}

/// Optimizes a parametrized circuit. Uses L-BFGS with parameter-shift
/// gradients when `use_gradient` is set and every slot drives one gate,
/// otherwise the Nelder–Mead simplex.
pub fn hea_kernel(
    c: &Circuit,
    init_params: &[f64],
    h: &QubitOperator,
    noise: Option<&NoiseModel>,
    use_gradient: bool,
    shots: Option<Shots>,
) -> Result<OptResult> {
    c.check_params(init_params)?;
    let start = Instant::now();
    let gradient_ok = match slot_gates(c) {
        Ok(_) => true,
        Err(Error::SharedParameterUnsupported(_)) => false,
        Err(e) => return Err(e),
    };
    let mut calls = 0u64;
    let mut next_shots = move || {
        calls += 1;
        shots.map(|s| Shots {
            per_term: s.per_term,
            seed: s.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(calls << 20),
        })
    };
    let min = if use_gradient && gradient_ok {
        lbfgs(
            |x| {
                let sh = next_shots();
                let e = circuit_energy(c, x, h, noise, sh)?;
                let g = parameter_shift_gradient(c, x, h, noise, sh)?;
                Ok((e, g))
            },
            init_params,
            &LbfgsOptions::default(),
        )?
    } else {
        nelder_mead(
            |x| circuit_energy(c, x, h, noise, next_shots()),
            init_params,
            &NelderMeadOptions::default(),
        )?
    };
    Ok(OptResult {
        e: min.f,
        x: min.x,
        init_guess: init_params.to_vec(),
        nit: min.nit,
        nfev: min.nfev,
        njev: min.njev,
        grad_at_opt: min.grad,
        converged: min.converged,
        message: min.message,
        opt_time: start.elapsed().as_secs_f64(),
    })
}

/// Generator `g − g†` of one excitation as a fermion operator.
pub fn excitation_generator(e: &Excitation, n_spin_orbitals: usize) -> Result<FermionOperator> {
    let mut op = FermionOperator::new(n_spin_orbitals);
    let mut f: Vec<Ladder> = e.creators().iter().map(|&i| Ladder::create(i)).collect();
    f.extend(e.annihilators().iter().map(|&i| Ladder::annihilate(i)));
    op.add_term(&f, 1.0)?;
    for t in op.adjoint().terms() {
        op.add_term(&t.factors, -t.coefficient)?;
    }
    Ok(op)
}

/// HF preparation with X gates, then each UCC factor as a product of Pauli
/// rotations from the Jordan–Wigner image of its generator. The strings of
/// one generator commute, so each factor is reproduced exactly.
pub fn compile_ucc_trotter(problem: &UCCProblem, params: &[f64]) -> Result<Circuit> {
    let s = &problem.integrals;
    let n = 2 * s.n_orb;
    if n > TROTTER_QUBIT_LIMIT {
        return Err(Error::SizeLimit(format!(
            "{n} qubits exceeds the Trotter compiler limit"
        )));
    }
    if params.len() != problem.n_params() {
        return Err(Error::InvalidParams(format!(
            "{} parameters given, ansatz has {}",
            params.len(),
            problem.n_params()
        )));
    }
    let mut circ = Circuit::new(n);
    let space = CISpace::new(s.n_orb, s.n_elec)?;
    let hf = space.hf_determinant();
    for so in 0..n {
        if hf >> so & 1 == 1 {
            circ.push(Gate::x(n - 1 - so))?;
        }
    }
    for (e, &id) in problem.ex_ops.iter().zip(&problem.param_ids) {
        let q = jordan_wigner(&excitation_generator(e, n)?)?;
        // e^{θ Σ i a_k P_k} = Π e^{−iφ_k P_k} with φ_k = −θ a_k
        for term in q.terms() {
            let letters: Vec<(usize, Pauli)> = term.letters.iter().map(|(&q, &p)| (q, p)).collect();
            let phi = -params[id] * term.coefficient.im;
            circ.push(Gate::pauli_rot(&letters, Angle::Fixed(phi)))?;
        }
    }
    Ok(circ)
}
