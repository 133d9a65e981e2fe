use rayon::prelude::*;

use super::{OperatorPool, UCCProblem};
use crate::civector::{CIHamiltonian, CiModel, UccCircuit};
use crate::integrals::{hf_energy, IntegralSet};
use crate::linalg::dot;
use crate::vqe::kernel;
use crate::{Error, Result};

/// Outcome of an ADAPT run.
#[derive(Debug, Clone)]
pub struct AdaptResult {
    pub problem: UCCProblem,
    /// HF energy followed by the optimized energy after each growth step.
    pub energies: Vec<f64>,
    /// Pool-gradient norm seen at the start of each step, including the final check.
    pub gradient_norms: Vec<f64>,
    /// Pool group chosen at each step.
    pub chosen: Vec<usize>,
    pub converged: bool,
}

/// Grows an ansatz one pool group at a time, picking the group with the
/// largest energy gradient and re-optimizing from the previous optimum.
pub fn adapt_vqe(s: &IntegralSet, pool: &OperatorPool, epsilon: f64, max_iter: usize) -> Result<AdaptResult> {
    if epsilon <= 0.0 || epsilon.is_nan() {
        return Err(Error::InvalidParams(format!("epsilon must be positive, got {epsilon}")));
    }
    let h = CIHamiltonian::from_integrals(s)?;
    let pool_maps = pool
        .groups
        .iter()
        .map(|g| g.iter().map(|e| h.excitation_map(e)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;

    let mut problem = UCCProblem::new(s.clone(), Vec::new(), Vec::new(), Vec::new(), false)?;
    let mut params: Vec<f64> = Vec::new();
    let mut energies = vec![hf_energy(s)];
    let mut gradient_norms = Vec::new();
    let mut chosen = Vec::new();
    let mut converged = false;

    for _ in 0..=max_iter {
        let circuit = UccCircuit::new(&h, &problem.ex_ops, &problem.param_ids)?;
        let psi = circuit.state(&params, &h.reference_state())?;
        let hpsi = h.apply_hamiltonian(&psi);
        let grads: Vec<f64> = pool_maps
            .par_iter()
            .map(|maps| maps.iter().map(|m| 2.0 * m.matrix_element(&hpsi, &psi)).sum())
            .collect();
        let norm = dot(&grads, &grads).sqrt();
        gradient_norms.push(norm);
        if norm < epsilon {
            converged = true;
            break;
        }
        if chosen.len() == max_iter {
            break;
        }
        let mut best = 0;
        for (k, g) in grads.iter().enumerate() {
            if g.abs() > grads[best].abs() {
                best = k;
            }
        }
        let id = params.len();
        for e in &pool.groups[best] {
            problem.ex_ops.push(e.clone());
            problem.param_ids.push(id);
        }
        params.push(0.0);
        problem.init_guess = params.clone();
        let res = kernel(&problem).map_err(|e| Error::SolverFailed(e.to_string()))?;
        params = res.x;
        energies.push(res.e);
        chosen.push(best);
    }
    problem.init_guess = params;
    Ok(AdaptResult {
        problem,
        energies,
        gradient_norms,
        chosen,
        converged,
    })
}
