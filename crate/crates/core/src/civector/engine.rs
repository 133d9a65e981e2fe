use rayon::prelude::*;

use super::Excitation;
use crate::linalg::{axpy, dot};
use crate::{Error, Result};

/// Support of the non-Hermitian part `g` of an excitation: `g|from⟩ = sign·|to⟩`.
#[derive(Debug, Clone, Default)]
pub struct ExcitationMap {
    from: Vec<u32>,
    to: Vec<u32>,
    sign: Vec<f64>,
    // true when no determinant is both a source and a target, so that each
    // pair spans its own invariant plane
    disjoint: bool,
}

impl ExcitationMap {
    pub fn from_pairs(pairs: Vec<(usize, usize, f64)>) -> Self {
        let mut m = Self::default();
        for (f, t, s) in pairs {
            m.from.push(f as u32);
            m.to.push(t as u32);
            m.sign.push(s);
        }
        let top = m.from.iter().chain(&m.to).map(|&i| i as usize + 1).max().unwrap_or(0);
        let mut seen = vec![false; top];
        for &f in &m.from {
            seen[f as usize] = true;
        }
        m.disjoint = m.to.iter().all(|&t| !seen[t as usize]);
        m
    }

    pub fn len(&self) -> usize {
        self.from.len()
    }

    pub fn is_empty(&self) -> bool {
        self.from.is_empty()
    }

    /// `out += G v` with `G = g − g†`.
    pub fn apply_add(&self, v: &[f64], out: &mut [f64]) {
        for k in 0..self.from.len() {
            let (f, t, s) = (self.from[k] as usize, self.to[k] as usize, self.sign[k]);
            out[t] += s * v[f];
            out[f] -= s * v[t];
        }
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        self.apply_add(v, &mut out);
        out
    }

    /// `⟨u|G|v⟩` without allocating.
    pub fn matrix_element(&self, u: &[f64], v: &[f64]) -> f64 {
        let mut acc = 0.0;
        for k in 0..self.from.len() {
            let (f, t, s) = (self.from[k] as usize, self.to[k] as usize, self.sign[k]);
            acc += s * (u[t] * v[f] - u[f] * v[t]);
        }
        acc
    }

    /// `e^{θG} v = v + sin θ·Gv + (1 − cos θ)·G²v`, in place.
    ///
    /// Within the support every pair `(from, to)` spans an invariant plane,
    /// so the update reduces to a 2×2 rotation per pair.
    pub fn apply_factor(&self, v: &mut [f64], theta: f64) {
        if theta == 0.0 {
            return;
        }
        if !self.disjoint {
            let out = factor_expansion(self, v, theta);
            v.copy_from_slice(&out);
            return;
        }
        let (s, c) = theta.sin_cos();
        for k in 0..self.from.len() {
            let (f, t, sg) = (self.from[k] as usize, self.to[k] as usize, self.sign[k]);
            let (vf, vt) = (v[f], v[t]);
            v[t] = c * vt + s * sg * vf;
            v[f] = c * vf - s * sg * vt;
        }
    }
}

/// A real symmetric Hamiltonian on a finite basis that also knows how to
/// represent excitation operators on that basis.
pub trait CiModel: Sync {
    fn dim(&self) -> usize;
    fn excitation_map(&self, ex: &Excitation) -> Result<ExcitationMap>;
    fn apply_hamiltonian(&self, v: &[f64]) -> Vec<f64>;
    fn reference_state(&self) -> Vec<f64>;
}

/// Excitation maps for an ordered factor list with its parameter map.
#[derive(Debug, Clone)]
pub struct UccCircuit {
    maps: Vec<ExcitationMap>,
    param_ids: Vec<usize>,
    n_params: usize,
}

impl UccCircuit {
    pub fn new<M: CiModel + ?Sized>(model: &M, ex_ops: &[Excitation], param_ids: &[usize]) -> Result<Self> {
        if ex_ops.len() != param_ids.len() {
            return Err(Error::InvalidParamMap(format!(
                "{} excitations but {} parameter ids",
                ex_ops.len(),
                param_ids.len()
            )));
        }
        let maps = ex_ops
            .par_iter()
            .map(|ex| model.excitation_map(ex))
            .collect::<Result<Vec<_>>>()?;
        let n_params = param_ids.iter().map(|&i| i + 1).max().unwrap_or(0);
        Ok(Self {
            maps,
            param_ids: param_ids.to_vec(),
            n_params,
        })
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn n_factors(&self) -> usize {
        self.maps.len()
    }

    pub fn maps(&self) -> &[ExcitationMap] {
        &self.maps
    }

    fn check(&self, params: &[f64]) -> Result<()> {
        if params.len() < self.n_params {
            return Err(Error::InvalidParamMap(format!(
                "parameter id {} out of range for {} parameters",
                self.n_params - 1,
                params.len()
            )));
        }
        Ok(())
    }

    /// Applies the factors in list order to `initial`.
    pub fn state(&self, params: &[f64], initial: &[f64]) -> Result<Vec<f64>> {
        self.check(params)?;
        let mut v = initial.to_vec();
        for (map, &id) in self.maps.iter().zip(&self.param_ids) {
            map.apply_factor(&mut v, params[id]);
        }
        Ok(v)
    }

    /// Energy and gradient by one forward pass and one reverse sweep.
    /// `initial` must be normalized.
    pub fn energy_and_gradient<M: CiModel + ?Sized>(
        &self,
        model: &M,
        params: &[f64],
        initial: &[f64],
    ) -> Result<(f64, Vec<f64>)> {
        let mut ket = self.state(params, initial)?;
        let mut bra = model.apply_hamiltonian(&ket);
        let e = dot(&ket, &bra);
        let mut grad = vec![0.0; params.len()];
        for (map, &id) in self.maps.iter().zip(&self.param_ids).rev() {
            grad[id] += 2.0 * map.matrix_element(&bra, &ket);
            let theta = params[id];
            map.apply_factor(&mut ket, -theta);
            map.apply_factor(&mut bra, -theta);
        }
        Ok((e, grad))
    }
}

/// `⟨v|H|v⟩ / ⟨v|v⟩`.
pub fn model_energy<M: CiModel + ?Sized>(model: &M, v: &[f64]) -> Result<f64> {
    let nn = dot(v, v);
    if nn == 0.0 {
        return Err(Error::ZeroState);
    }
    Ok(dot(v, &model.apply_hamiltonian(v)) / nn)
}

/// `e^{θG} v` via the three-term expansion with two generator applications.
pub fn factor_expansion(map: &ExcitationMap, v: &[f64], theta: f64) -> Vec<f64> {
    let gv = map.apply(v);
    let ggv = map.apply(&gv);
    let mut out = v.to_vec();
    axpy(theta.sin(), &gv, &mut out);
    axpy(1.0 - theta.cos(), &ggv, &mut out);
    out
}
