//! Parameter optimization and result reporting.

use std::fmt::Write as _;
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use crate::ansatz::{PairedModel, UCCProblem};
use crate::civector::{civector_to_statevector, CISpace, CIVector, UccCircuit};
use crate::integrals::{hf_energy, mp2};
use crate::optimize::{lbfgs, LbfgsOptions};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    pub e: f64,
    pub x: Vec<f64>,
    pub init_guess: Vec<f64>,
    pub nit: usize,
    pub nfev: usize,
    pub njev: usize,
    pub grad_at_opt: Vec<f64>,
    pub converged: bool,
    pub message: String,
    pub opt_time: f64,
}

/// Minimizes the ansatz energy from `problem.init_guess` with L-BFGS.
pub fn kernel(problem: &UCCProblem) -> Result<OptResult> {
    kernel_with(problem, &LbfgsOptions::default())
}

pub fn kernel_with(problem: &UCCProblem, opts: &LbfgsOptions) -> Result<OptResult> {
    problem.validate()?;
    let start = Instant::now();
    let model = problem.model()?;
    let circuit = UccCircuit::new(model.as_ref(), &problem.ex_ops, &problem.param_ids)?;
    let reference = model.reference_state();
    let min = lbfgs(
        |x| circuit.energy_and_gradient(model.as_ref(), x, &reference),
        &problem.init_guess,
        opts,
    )?;
    Ok(OptResult {
        e: min.f,
        x: min.x,
        init_guess: problem.init_guess.clone(),
        nit: min.nit,
        nfev: min.nfev,
        njev: min.njev,
        grad_at_opt: min.grad,
        converged: min.converged,
        message: min.message,
        opt_time: start.elapsed().as_secs_f64(),
    })
}

fn check_params(problem: &UCCProblem, params: &[f64]) -> Result<()> {
    if params.len() != problem.n_params() {
        return Err(Error::InvalidParams(format!(
            "{} parameters given, ansatz has {}",
            params.len(),
            problem.n_params()
        )));
    }
    Ok(())
}

pub fn energy_at(problem: &UCCProblem, params: &[f64]) -> Result<f64> {
    check_params(problem, params)?;
    let model = problem.model()?;
    let circuit = UccCircuit::new(model.as_ref(), &problem.ex_ops, &problem.param_ids)?;
    let v = circuit.state(params, &model.reference_state())?;
    crate::civector::model_energy(model.as_ref(), &v)
}

/// Ansatz state in the full determinant space, also for pair-only problems.
pub fn civector_at(problem: &UCCProblem, params: &[f64]) -> Result<CIVector> {
    check_params(problem, params)?;
    let s = &problem.integrals;
    let space = CISpace::new(s.n_orb, s.n_elec)?;
    if problem.hard_core_boson {
        let model = PairedModel::new(s)?;
        let circuit = UccCircuit::new(&model, &problem.ex_ops, &problem.param_ids)?;
        let paired = circuit.state(params, &crate::civector::CiModel::reference_state(&model))?;
        let mut full = vec![0.0; space.dim()];
        for (&bits, a) in model.strings().iter().zip(paired) {
            let det = (bits as u128) << s.n_orb | bits as u128;
            full[space.index_of(det)] = a;
        }
        CIVector::new(&space, full)
    } else {
        let circuit = UccCircuit::new(&space, &problem.ex_ops, &problem.param_ids)?;
        let v = circuit.state(params, &space.hf_vector())?;
        CIVector::new(&space, v)
    }
}

pub fn statevector_at(problem: &UCCProblem, params: &[f64]) -> Result<Vec<Complex64>> {
    let v = civector_at(problem, params)?;
    let space = CISpace::new(v.n_orb, v.n_alpha + v.n_beta)?;
    civector_to_statevector(&space, &v.amplitudes)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyRow {
    pub method: String,
    pub energy: f64,
    pub error_mh: Option<f64>,
    pub correlation_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExcitationRow {
    pub excitation: Vec<usize>,
    pub configuration: String,
    pub parameter: f64,
    pub init_guess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryReport {
    pub n_qubits: usize,
    pub n_params: usize,
    pub n_excitations: usize,
    pub initial_condition: String,
    pub energies: Vec<EnergyRow>,
    pub excitations: Vec<ExcitationRow>,
    pub e: f64,
    pub x: Vec<f64>,
    pub init_guess: Vec<f64>,
    pub jac: Vec<f64>,
    pub message: String,
    pub nit: usize,
    pub nfev: usize,
    pub njev: usize,
    pub converged: bool,
    pub opt_time: f64,
}

/// Builds the summary tables and renders them as text.
pub fn print_summary(
    problem: &UCCProblem,
    result: &OptResult,
    fci_reference: Option<f64>,
) -> Result<(SummaryReport, String)> {
    let s = &problem.integrals;
    let space = CISpace::new(s.n_orb, s.n_elec)?;
    let e_hf = hf_energy(s);
    let row = |method: &str, energy: f64| EnergyRow {
        method: method.into(),
        energy,
        error_mh: fci_reference.map(|f| (energy - f) * 1000.0),
        correlation_pct: fci_reference.map(|f| (energy - e_hf) / (f - e_hf) * 100.0),
    };
    let mut energies = vec![row("HF", e_hf)];
    if let Ok(m) = mp2(s) {
        energies.push(row("MP2", e_hf + m.e_corr));
    }
    let label = if problem.hard_core_boson { "pUCCD" } else { "UCC" };
    energies.push(row(label, result.e));
    if let Some(f) = fci_reference {
        energies.push(row("FCI", f));
    }

    let hf = space.hf_determinant();
    let excitations = problem
        .ex_ops
        .iter()
        .zip(&problem.param_ids)
        .map(|(e, &id)| ExcitationRow {
            excitation: e.indices().to_vec(),
            configuration: e.act(hf).map(|(d, _)| space.bitstring(d)).unwrap_or_default(),
            parameter: result.x[id],
            init_guess: result.init_guess[id],
        })
        .collect();

    let report = SummaryReport {
        n_qubits: if problem.hard_core_boson { s.n_orb } else { 2 * s.n_orb },
        n_params: problem.n_params(),
        n_excitations: problem.ex_ops.len(),
        initial_condition: "RHF".into(),
        energies,
        excitations,
        e: result.e,
        x: result.x.clone(),
        init_guess: result.init_guess.clone(),
        jac: result.grad_at_opt.clone(),
        message: result.message.clone(),
        nit: result.nit,
        nfev: result.nfev,
        njev: result.njev,
        converged: result.converged,
        opt_time: result.opt_time,
    };
    let text = render(&report);
    Ok((report, text))
}

fn banner(out: &mut String, title: &str) {
    let width = 71;
    let inner = format!(" {title} ");
    let left = (width - inner.len()) / 2;
    let right = width - inner.len() - left;
    let _ = writeln!(out, "{}{inner}{}", "#".repeat(left), "#".repeat(right));
}

fn render(r: &SummaryReport) -> String {
    let mut out = String::new();
    banner(&mut out, "Ansatz");
    let _ = writeln!(out, " #qubits  #params  #excitations initial condition");
    let _ = writeln!(
        out,
        "{:>8} {:>8} {:>13} {:>17}",
        r.n_qubits, r.n_params, r.n_excitations, r.initial_condition
    );
    banner(&mut out, "Circuit");
    let _ = writeln!(out, " gate counting is not available");
    banner(&mut out, "Energy");
    let _ = writeln!(out, "       energy (Hartree)  error (mH) correlation energy (%)");
    for row in &r.energies {
        let opt = |x: Option<f64>, prec: usize| x.map_or("-".to_string(), |v| format!("{v:.prec$}"));
        let _ = writeln!(
            out,
            "{:<6} {:>16.6} {:>11} {:>22}",
            row.method,
            row.energy,
            opt(row.error_mh, 6),
            opt(row.correlation_pct, 3)
        );
    }
    banner(&mut out, "Excitations");
    let _ = writeln!(out, "     excitation configuration     parameter  initial guess");
    for (k, row) in r.excitations.iter().enumerate() {
        let tuple = format!(
            "({})",
            row.excitation
                .iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        );
        let _ = writeln!(
            out,
            "{k:<3}{tuple:>12} {:>13} {:>13.6e} {:>14.6}",
            row.configuration, row.parameter, row.init_guess
        );
    }
    banner(&mut out, "Optimization Result");
    let list = |xs: &[f64]| xs.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(", ");
    let _ = writeln!(out, "{:>13}: {}", "e", r.e);
    let _ = writeln!(out, "{:>13}: [{}]", "init_guess", list(&r.init_guess));
    let _ = writeln!(out, "{:>13}: [{}]", "jac", list(&r.jac));
    let _ = writeln!(out, "{:>13}: '{}'", "message", r.message);
    let _ = writeln!(out, "{:>13}: {}", "nfev", r.nfev);
    let _ = writeln!(out, "{:>13}: {}", "nit", r.nit);
    let _ = writeln!(out, "{:>13}: {}", "njev", r.njev);
    let _ = writeln!(out, "{:>13}: {}", "opt_time", r.opt_time);
    let _ = writeln!(out, "{:>13}: {}", "success", if r.converged { "True" } else { "False" });
    let _ = writeln!(out, "{:>13}: [{}]", "x", list(&r.x));
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Energies {
    pub hf: f64,
    pub mp2: Option<f64>,
    pub ucc: f64,
    pub fci: Option<f64>,
}

/// Machine-readable result record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VqeRecord {
    pub energies: Energies,
    pub params: Vec<f64>,
    pub ex_ops: Vec<Vec<usize>>,
    pub param_ids: Vec<usize>,
    pub nit: usize,
    pub converged: bool,
    pub wall_time_s: Option<f64>,
}

impl VqeRecord {
    /// `wall_time_s` is left empty so that output is reproducible; set it explicitly when wanted.
    pub fn new(problem: &UCCProblem, result: &OptResult, fci: Option<f64>) -> Self {
        let s = &problem.integrals;
        let e_hf = hf_energy(s);
        Self {
            energies: Energies {
                hf: e_hf,
                mp2: mp2(s).ok().map(|m| e_hf + m.e_corr),
                ucc: result.e,
                fci,
            },
            params: result.x.clone(),
            ex_ops: problem.ex_ops.iter().map(|e| e.indices().to_vec()).collect(),
            param_ids: problem.param_ids.clone(),
            nit: result.nit,
            converged: result.converged,
            wall_time_s: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serializes")
    }
}
