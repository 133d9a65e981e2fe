//! Python bindings: thin wrappers returning plain lists, floats and dicts.

use civec::ansatz::UCCProblem;
use civec::civector::{self, ci_space_dim, CISpace, Excitation};
use civec::dynamics::{self as dyn_, Encoding, Integrator};
use civec::gates::{build_ry_ansatz, hea_kernel, parity_reduced_hf_qubits, ry_reference_params, NoiseModel};
use civec::integrals::{build_fermion_hamiltonian, hf_energy, parse_fcidump, IntegralSet};
use civec::operator::{jordan_wigner, parity_transform};
use civec::vqe::kernel;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: civec::Error) -> PyErr {
    PyValueError::new_err(format!("{}: {e}", e.name()))
}

fn integrals(fcidump: &str) -> PyResult<IntegralSet> {
    parse_fcidump(fcidump).map_err(err)
}

/// Determinant-space dimension for `n_elec` electrons in `n_orb` orbitals.
#[pyfunction]
fn ci_dim(n_orb: usize, n_elec: usize) -> PyResult<u64> {
    ci_space_dim(n_orb, n_elec).map_err(err)
}

#[pyfunction]
fn hf(fcidump: &str) -> PyResult<f64> {
    Ok(hf_energy(&integrals(fcidump)?))
}

#[pyfunction]
fn fci(fcidump: &str) -> PyResult<f64> {
    let s = integrals(fcidump)?;
    let space = CISpace::new(s.n_orb, s.n_elec).map_err(err)?;
    Ok(civector::fci_ground_state(&space, &s).map_err(err)?.0)
}

/// Optimized UCC energy and parameters; `kind` is `uccsd` or `puccd`.
#[pyfunction]
#[pyo3(signature = (fcidump, kind = "uccsd"))]
fn ucc<'py>(py: Python<'py>, fcidump: &str, kind: &str) -> PyResult<Bound<'py, PyDict>> {
    let s = integrals(fcidump)?;
    let p = match kind {
        "uccsd" => UCCProblem::uccsd(&s),
        "puccd" => UCCProblem::puccd(&s),
        _ => return Err(PyValueError::new_err(format!("unknown ansatz {kind:?}"))),
    }
    .map_err(err)?;
    let r = kernel(&p).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("energy", r.e)?;
    d.set_item("params", r.x)?;
    d.set_item(
        "ex_ops",
        p.ex_ops.iter().map(|e| e.indices().to_vec()).collect::<Vec<_>>(),
    )?;
    d.set_item("param_ids", p.param_ids)?;
    d.set_item("converged", r.converged)?;
    Ok(d)
}

/// Qubit Hamiltonian terms as `(label, real, imag)`; `mapping` is `jw`, `parity` or `parity-reduced`.
#[pyfunction]
#[pyo3(signature = (fcidump, mapping = "jw"))]
fn qubit_hamiltonian(fcidump: &str, mapping: &str) -> PyResult<Vec<(String, f64, f64)>> {
    let s = integrals(fcidump)?;
    let f = build_fermion_hamiltonian(&s);
    let q = match mapping {
        "jw" => jordan_wigner(&f),
        "parity" => parity_transform(&f, s.n_elec, false),
        "parity-reduced" => parity_transform(&f, s.n_elec, true),
        _ => return Err(PyValueError::new_err(format!("unknown mapping {mapping:?}"))),
    }
    .map_err(err)?;
    Ok(q.terms()
        .map(|t| (t.label(), t.coefficient.re, t.coefficient.im))
        .collect())
}

/// One UCC factor `exp(θ(G − G†))` applied to a CI vector.
#[pyfunction]
fn apply_ucc_factor(
    n_orb: usize,
    n_elec: usize,
    vector: Vec<f64>,
    excitation: Vec<usize>,
    theta: f64,
) -> PyResult<Vec<f64>> {
    let space = CISpace::new(n_orb, n_elec).map_err(err)?;
    let ex = Excitation::new(excitation).map_err(err)?;
    civector::apply_ucc_factor(&space, &vector, &ex, theta).map_err(err)
}

/// Optimized hardware-efficient-ansatz energy with CNOT depolarizing noise.
#[pyfunction]
#[pyo3(signature = (fcidump, p, layers = 1))]
fn noisy_energy(fcidump: &str, p: f64, layers: usize) -> PyResult<f64> {
    let s = integrals(fcidump)?;
    let h = parity_transform(&build_fermion_hamiltonian(&s), s.n_elec, true).map_err(err)?;
    let n = h.n_qubits();
    let c = build_ry_ansatz(n, layers);
    let init = ry_reference_params(n, layers, &parity_reduced_hf_qubits(s.n_orb, s.n_elec).map_err(err)?);
    let nm = NoiseModel::cnot_depolarizing(p).map_err(err)?;
    Ok(hea_kernel(&c, &init, &h, Some(&nm), true, None).map_err(err)?.e)
}

/// Spin-boson `⟨σ_z⟩(t)` from the variational ansatz and from exact propagation.
#[pyfunction]
#[pyo3(signature = (nbas = 8, layers = 3, t_final = 10.0, tau = 0.02, epsilon = 0.0, delta = 1.0, omega = 1.0, g = 0.5))]
#[allow(clippy::too_many_arguments)]
fn spin_boson<'py>(
    py: Python<'py>,
    nbas: usize,
    layers: usize,
    t_final: f64,
    tau: f64,
    epsilon: f64,
    delta: f64,
    omega: f64,
    g: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let m = dyn_::spin_boson_model(epsilon, delta, omega, g, nbas).map_err(err)?;
    let enc = m.encode(Encoding::Gray).map_err(err)?;
    let h = enc.dense_terms().map_err(err)?;
    let psi0 = m.initial_state(Encoding::Gray).map_err(err)?;
    let sz = m.sigma_z("spin", Encoding::Gray).map_err(err)?;
    let vha = dyn_::build_vha(&enc, layers, psi0.clone()).map_err(err)?;
    let th = vec![0.0; vha.n_params()];
    let tr = dyn_::time_evolve(&h, &vha, &th, t_final, tau, Integrator::Rk4, std::slice::from_ref(&sz)).map_err(err)?;
    let exact = dyn_::observable_series(&dyn_::exact_propagate(&h, &psi0, &tr.times).map_err(err)?, &sz);
    let d = PyDict::new(py);
    d.set_item("times", tr.times)?;
    d.set_item("sz", tr.observables.iter().map(|o| o[0]).collect::<Vec<_>>())?;
    d.set_item("sz_exact", exact)?;
    d.set_item("n_qubits", enc.n_qubits())?;
    Ok(d)
}

#[pymodule]
fn civec_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(ci_dim, m)?)?;
    m.add_function(wrap_pyfunction!(hf, m)?)?;
    m.add_function(wrap_pyfunction!(fci, m)?)?;
    m.add_function(wrap_pyfunction!(ucc, m)?)?;
    m.add_function(wrap_pyfunction!(qubit_hamiltonian, m)?)?;
    m.add_function(wrap_pyfunction!(apply_ucc_factor, m)?)?;
    m.add_function(wrap_pyfunction!(noisy_energy, m)?)?;
    m.add_function(wrap_pyfunction!(spin_boson, m)?)?;
    Ok(())
}
