use std::fmt;

use indexmap::IndexMap;

use super::PRUNE_TOL;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LadderKind {
    Create,
    Annihilate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ladder {
    pub index: usize,
    pub kind: LadderKind,
}

impl Ladder {
    pub fn create(index: usize) -> Self {
        Self {
            index,
            kind: LadderKind::Create,
        }
    }

    pub fn annihilate(index: usize) -> Self {
        Self {
            index,
            kind: LadderKind::Annihilate,
        }
    }

    fn dagger(self) -> Self {
        Self {
            index: self.index,
            kind: match self.kind {
                LadderKind::Create => LadderKind::Annihilate,
                LadderKind::Annihilate => LadderKind::Create,
            },
        }
    }
}

/// A product of ladder operators (leftmost acts last) with a real weight.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderTerm {
    pub factors: Vec<Ladder>,
    pub coefficient: f64,
}

/// Sum of ladder-operator products over `n_spin_orbitals` modes.
///
/// Terms are merged only when their factor sequences are identical; no
/// normal ordering is applied.
#[derive(Debug, Clone, PartialEq)]
pub struct FermionOperator {
    n_spin_orbitals: usize,
    terms: IndexMap<Vec<Ladder>, f64>,
}

impl FermionOperator {
    pub fn new(n_spin_orbitals: usize) -> Self {
        Self {
            n_spin_orbitals,
            terms: IndexMap::new(),
        }
    }

    pub fn identity(n_spin_orbitals: usize, coefficient: f64) -> Self {
        let mut op = Self::new(n_spin_orbitals);
        op.terms.insert(Vec::new(), coefficient);
        op
    }

    pub fn n_spin_orbitals(&self) -> usize {
        self.n_spin_orbitals
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, factors: &[Ladder], coefficient: f64) -> Result<()> {
        if let Some(bad) = factors.iter().find(|f| f.index >= self.n_spin_orbitals) {
            return Err(Error::InvalidOperator(format!(
                "spin-orbital {} out of range for {} spin-orbitals",
                bad.index, self.n_spin_orbitals
            )));
        }
        *self.terms.entry(factors.to_vec()).or_insert(0.0) += coefficient;
        Ok(())
    }

    pub fn terms(&self) -> impl Iterator<Item = LadderTerm> + '_ {
        self.terms.iter().map(|(f, c)| LadderTerm {
            factors: f.clone(),
            coefficient: *c,
        })
    }

    /// Coefficient of an exact factor sequence, zero when absent.
    pub fn coefficient(&self, factors: &[Ladder]) -> f64 {
        self.terms.get(factors).copied().unwrap_or(0.0)
    }

    pub fn simplify(&self) -> Self {
        Self {
            n_spin_orbitals: self.n_spin_orbitals,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.abs() >= PRUNE_TOL)
                .map(|(f, c)| (f.clone(), *c))
                .collect(),
        }
    }

    /// Hermitian adjoint: reverse each product and swap creation/annihilation.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::new(self.n_spin_orbitals);
        for (f, c) in &self.terms {
            let rev: Vec<Ladder> = f.iter().rev().map(|l| l.dagger()).collect();
            *out.terms.entry(rev).or_insert(0.0) += c;
        }
        out
    }

    /// Parses lines of the form `coeff [2^ 0 1^ 3]`.
    pub fn parse(n_spin_orbitals: usize, text: &str) -> Result<Self> {
        let mut op = Self::new(n_spin_orbitals);
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| Error::Parse { line: lineno + 1, msg };
            let open = line.find('[').ok_or_else(|| err("missing '['".into()))?;
            let close = line.rfind(']').ok_or_else(|| err("missing ']'".into()))?;
            let coeff: f64 = line[..open]
                .trim()
                .parse()
                .map_err(|_| err(format!("bad coefficient {:?}", line[..open].trim())))?;
            let mut factors = Vec::new();
            for tok in line[open + 1..close].split_whitespace() {
                let (idx, kind) = match tok.strip_suffix('^') {
                    Some(i) => (i, LadderKind::Create),
                    None => (tok, LadderKind::Annihilate),
                };
                let index: usize = idx.parse().map_err(|_| err(format!("bad index {tok:?}")))?;
                factors.push(Ladder { index, kind });
            }
            op.add_term(&factors, coeff).map_err(|e| err(e.to_string()))?;
        }
        Ok(op)
    }
}

impl fmt::Display for FermionOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (factors, c) in &self.terms {
            let body: Vec<String> = factors
                .iter()
                .map(|l| match l.kind {
                    LadderKind::Create => format!("{}^", l.index),
                    LadderKind::Annihilate => format!("{}", l.index),
                })
                .collect();
            writeln!(f, "{} [{}]", c, body.join(" "))?;
        }
        Ok(())
    }
}
