//! Ansatz construction: excitation generators with parameter sharing, MP2
//! initial guesses with screening and sorting, operator pools and ADAPT-VQE.

mod adapt;
mod generate;
mod paired;

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use adapt::{adapt_vqe, AdaptResult};
pub use generate::{generate_kupccgsd, generate_puccd, generate_uccsd};
pub use paired::{build_puccd_hamiltonian, PairedHamiltonian, PairedModel};

use crate::civector::{CIHamiltonian, CiModel, Excitation};
use crate::integrals::{mp2, IntegralSet, Mp2Result};
use crate::{Error, Result};

/// Default threshold below which MP2-screened doubles are dropped.
pub const DEFAULT_SCREEN_EPS: f64 = 1e-8;
/// Amplitude of the seeded noise added to k-UpCCGSD initial guesses.
pub const KUPCCGSD_NOISE: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq)]
pub struct UCCProblem {
    pub integrals: IntegralSet,
    pub ex_ops: Vec<Excitation>,
    pub param_ids: Vec<usize>,
    pub init_guess: Vec<f64>,
    pub hard_core_boson: bool,
}

impl UCCProblem {
    pub fn new(
        integrals: IntegralSet,
        ex_ops: Vec<Excitation>,
        param_ids: Vec<usize>,
        init_guess: Vec<f64>,
        hard_core_boson: bool,
    ) -> Result<Self> {
        let p = Self {
            integrals,
            ex_ops,
            param_ids,
            init_guess,
            hard_core_boson,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn n_params(&self) -> usize {
        self.param_ids.iter().map(|&i| i + 1).max().unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ex_ops.len() != self.param_ids.len() {
            return Err(Error::InvalidParamMap(format!(
                "{} excitations but {} parameter ids",
                self.ex_ops.len(),
                self.param_ids.len()
            )));
        }
        let np = self.n_params();
        let mut seen = vec![false; np];
        for &i in &self.param_ids {
            seen[i] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidParamMap(format!("parameter {missing} is never used")));
        }
        if self.init_guess.len() != np {
            return Err(Error::InvalidParams(format!(
                "{} initial values for {np} parameters",
                self.init_guess.len()
            )));
        }
        for e in &self.ex_ops {
            e.validate(self.integrals.n_orb)?;
        }
        Ok(())
    }

    /// UCCSD with MP2 initial guesses, default screening and sorting. When
    /// the orbital energies are degenerate the guesses fall back to zero and
    /// nothing is screened.
    pub fn uccsd(s: &IntegralSet) -> Result<Self> {
        let (ops, ids) = generate_uccsd(s.n_orb, s.n_elec);
        let n = ids.iter().map(|&i| i + 1).max().unwrap_or(0);
        let base = Self::new(s.clone(), ops, ids, vec![0.0; n], false)?;
        match mp2(s) {
            Ok(t2) => Ok(mp2_initialize(&base, &t2, DEFAULT_SCREEN_EPS, true)),
            Err(Error::DegenerateOrbitals(_)) => Ok(base),
            Err(e) => Err(e),
        }
    }

    /// k-UpCCGSD with zero guesses plus seeded uniform noise.
    pub fn kupccgsd(s: &IntegralSet, k: usize, seed: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParams("k-UpCCGSD needs k ≥ 1".into()));
        }
        let (ops, ids) = generate_kupccgsd(s.n_orb, k);
        let n = ids.iter().map(|&i| i + 1).max().unwrap_or(0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let init = (0..n)
            .map(|_| rng.random_range(-KUPCCGSD_NOISE..KUPCCGSD_NOISE))
            .collect();
        Self::new(s.clone(), ops, ids, init, false)
    }

    /// Pair-doubles ansatz evaluated in the hard-core-boson space.
    pub fn puccd(s: &IntegralSet) -> Result<Self> {
        let (ops, ids) = generate_puccd(s.n_orb, s.n_elec);
        let n = ids.len();
        let base = Self::new(s.clone(), ops, ids, vec![0.0; n], true)?;
        match mp2(s) {
            Ok(t2) => Ok(mp2_initialize(&base, &t2, 0.0, false)),
            Err(Error::DegenerateOrbitals(_)) => Ok(base),
            Err(e) => Err(e),
        }
    }

    /// The Hamiltonian the ansatz is evaluated against.
    pub fn model(&self) -> Result<Box<dyn CiModel>> {
        if self.hard_core_boson {
            Ok(Box::new(PairedModel::new(&self.integrals)?))
        } else {
            Ok(Box::new(CIHamiltonian::from_integrals(&self.integrals)?))
        }
    }

    /// Parameter groups in first-appearance order of their ids.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.n_params()];
        for (k, &id) in self.param_ids.iter().enumerate() {
            groups[id].push(k);
        }
        groups
    }

    /// Text form: one excitation per line, `param_id  (p, q[, r, s])  init_guess`.
    pub fn to_ansatz_text(&self) -> String {
        let mut out = String::new();
        for (e, &id) in self.ex_ops.iter().zip(&self.param_ids) {
            let _ = writeln!(out, "{id}  {e}  {:.17e}", self.init_guess[id]);
        }
        out
    }

    /// Replaces the ansatz with one read from [`Self::to_ansatz_text`] form.
    pub fn from_ansatz_text(s: &IntegralSet, text: &str, hard_core_boson: bool) -> Result<Self> {
        let mut ops = Vec::new();
        let mut ids = Vec::new();
        let mut init: Vec<Option<f64>> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| Error::Parse { line: lineno + 1, msg };
            let open = line.find('(').ok_or_else(|| err("missing '('".into()))?;
            let close = line.find(')').ok_or_else(|| err("missing ')'".into()))?;
            let id: usize = line[..open]
                .trim()
                .parse()
                .map_err(|_| err(format!("bad parameter id {:?}", line[..open].trim())))?;
            let idx = line[open + 1..close]
                .split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| err("bad excitation indices".into()))?;
            let guess: f64 = line[close + 1..]
                .trim()
                .parse()
                .map_err(|_| err(format!("bad initial guess {:?}", line[close + 1..].trim())))?;
            ops.push(Excitation::new(idx).map_err(|e| err(e.to_string()))?);
            ids.push(id);
            if init.len() <= id {
                init.resize(id + 1, None);
            }
            init[id].get_or_insert(guess);
        }
        let init = init
            .into_iter()
            .enumerate()
            .map(|(k, g)| g.ok_or_else(|| Error::InvalidParamMap(format!("parameter {k} is never used"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(s.clone(), ops, ids, init, hard_core_boson)
    }
}

/// MP2 amplitude for an excitation, zero for singles.
fn t2_guess(e: &Excitation, n_orb: usize, t2: &Mp2Result) -> f64 {
    if e.rank() != 2 {
        return 0.0;
    }
    let no = t2.n_occ;
    let spatial = |i: usize| i % n_orb;
    let alpha = |i: usize| i >= n_orb;
    let (c, a) = (e.creators(), e.annihilators());
    let n_alpha_c = c.iter().filter(|&&i| alpha(i)).count();
    let occ = |i: usize| spatial(i) < no;
    if !(a.iter().all(|&i| occ(i)) && c.iter().all(|&i| !occ(i))) {
        return 0.0;
    }
    let v = |i: usize| spatial(i) - no;
    if n_alpha_c == 1 {
        // t2[α annihilated, β annihilated, α created, β created]
        let pick = |xs: &[usize], want_alpha: bool| *xs.iter().find(|&&i| alpha(i) == want_alpha).unwrap();
        t2.t2(
            spatial(pick(a, true)),
            spatial(pick(a, false)),
            v(pick(c, true)),
            v(pick(c, false)),
        )
    } else {
        // (b, a, i, j) in one spin sector
        let (i, j) = (spatial(a[0]), spatial(a[1]));
        let (b, aa) = (v(c[0]), v(c[1]));
        t2.t2(i, j, aa, b) - t2.t2(i, j, b, aa)
    }
}

/// Sets doubles to their MP2 amplitudes and singles to zero, drops doubles
/// with `|t2| < screen_eps` and optionally orders doubles by descending `|t2|`.
pub fn mp2_initialize(problem: &UCCProblem, t2: &Mp2Result, screen_eps: f64, sort: bool) -> UCCProblem {
    let n = problem.integrals.n_orb;
    let groups = problem.groups();
    let mut singles = Vec::new();
    let mut doubles = Vec::new();
    for g in groups {
        let lead = &problem.ex_ops[g[0]];
        if lead.rank() == 1 {
            singles.push((g, 0.0));
        } else {
            let amp = t2_guess(lead, n, t2);
            if amp.abs() >= screen_eps {
                doubles.push((g, amp));
            }
        }
    }
    if sort {
        doubles.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()));
    }
    let mut ex_ops = Vec::new();
    let mut param_ids = Vec::new();
    let mut init_guess = Vec::new();
    for (id, (g, amp)) in singles.into_iter().chain(doubles).enumerate() {
        for k in g {
            ex_ops.push(problem.ex_ops[k].clone());
            param_ids.push(id);
        }
        init_guess.push(amp);
    }
    UCCProblem {
        integrals: problem.integrals.clone(),
        ex_ops,
        param_ids,
        init_guess,
        hard_core_boson: problem.hard_core_boson,
    }
}

/// Excitations grouped by shared parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorPool {
    pub groups: Vec<Vec<Excitation>>,
}

impl OperatorPool {
    pub fn from_problem(problem: &UCCProblem) -> Self {
        Self {
            groups: problem
                .groups()
                .into_iter()
                .map(|g| g.into_iter().map(|k| problem.ex_ops[k].clone()).collect())
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }
}

/// The full UCCSD pool, one group per parameter before screening.
pub fn build_operator_pool(n_orb: usize, n_elec: usize) -> OperatorPool {
    let (ops, ids) = generate_uccsd(n_orb, n_elec);
    let n = ids.iter().map(|&i| i + 1).max().unwrap_or(0);
    let mut groups = vec![Vec::new(); n];
    for (e, id) in ops.into_iter().zip(ids) {
        groups[id].push(e);
    }
    OperatorPool { groups }
}
