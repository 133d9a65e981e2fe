use std::path::Path;
use std::time::Instant;

use civec::ansatz::{adapt_vqe, OperatorPool, UCCProblem};
use civec::civector::{fci_ground_state, CISpace};
use civec::dynamics::{self as dyn_, BasisSpec, DynamicsModel, Encoding, Integrator, SymbolicTerm};
use civec::gates::{
    average_gate_fidelity, build_ry_ansatz, circuit_energy, depolarizing_channel, hea_kernel, parity_reduced_hf_qubits,
    ry_reference_params, NoiseModel, Shots,
};
use civec::integrals::{
    active_space_reduce, build_fermion_hamiltonian, build_hubbard, hf_energy, parse_fcidump, write_fcidump, IntegralSet,
};
use civec::operator::{jordan_wigner, parity_transform, QubitOperator};
use civec::optimize::LbfgsOptions;
use civec::vqe::{kernel_with, print_summary, VqeRecord};
use civec::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::output::{num, Report};
use crate::{
    AnsatzArgs, AnsatzKind, Axis, CliError, Common, ConvertTarget, DynamicsArgs, EncodingKind, HubbardArgs,
    IntegratorKind, ModelKind, MoleculeArgs, SweepArgs,
};

type Res<T> = Result<T, CliError>;

fn read_integrals(path: &Path) -> Res<IntegralSet> {
    let text = std::fs::read_to_string(path).map_err(civec::Error::from)?;
    Ok(parse_fcidump(&text)?)
}

fn load(mol: &MoleculeArgs) -> Res<IntegralSet> {
    let s = read_integrals(&mol.fcidump)?;
    Ok(match mol.active_space {
        Some((ne, no)) => active_space_reduce(&s, ne, no)?.reduced,
        None => s,
    })
}

fn exact_energy(s: &IntegralSet) -> Res<f64> {
    Ok(fci_ground_state(&CISpace::new(s.n_orb, s.n_elec)?, s)?.0)
}

fn problem(s: &IntegralSet, a: &AnsatzArgs, seed: u64) -> Res<UCCProblem> {
    Ok(match a.ansatz {
        AnsatzKind::Uccsd => UCCProblem::uccsd(s)?,
        AnsatzKind::Kupccgsd => UCCProblem::kupccgsd(s, a.k, seed)?,
        AnsatzKind::Puccd => UCCProblem::puccd(s)?,
        AnsatzKind::Custom => {
            let path = a
                .ansatz_file
                .as_ref()
                .ok_or_else(|| CliError::Usage("--ansatz custom needs --ansatz-file".into()))?;
            let text = std::fs::read_to_string(path).map_err(civec::Error::from)?;
            UCCProblem::from_ansatz_text(s, &text, false)?
        }
    })
}

fn solve_ucc(s: &IntegralSet, a: &AnsatzArgs, with_fci: bool, c: &Common) -> Res<Report> {
    let start = Instant::now();
    let p = problem(s, a, c.seed)?;
    let opts = LbfgsOptions {
        max_iter: a.max_iter,
        pgtol: a.pgtol,
        ..LbfgsOptions::default()
    };
    let r = kernel_with(&p, &opts)?;
    let fci = if with_fci { Some(exact_energy(s)?) } else { None };
    let (_, summary) = print_summary(&p, &r, fci)?;
    let mut record = VqeRecord::new(&p, &r, fci);
    if c.timing {
        record.wall_time_s = Some(start.elapsed().as_secs_f64());
    }
    let e = &record.energies;
    let mut rows = vec![vec!["hf".to_string(), num(e.hf)]];
    if let Some(m) = e.mp2 {
        rows.push(vec!["mp2".into(), num(m)]);
    }
    rows.push(vec!["ucc".into(), num(e.ucc)]);
    if let Some(f) = e.fci {
        rows.push(vec!["fci".into(), num(f)]);
    }
    let mut report = Report::table(
        serde_json::to_value(&record).expect("record"),
        &["method", "energy"],
        rows,
    );
    report.text = Some(summary);
    Ok(report)
}

pub fn vqe(mol: &MoleculeArgs, a: &AnsatzArgs, no_fci: bool, c: &Common) -> Res<Report> {
    solve_ucc(&load(mol)?, a, !no_fci, c)
}

pub fn hubbard(h: &HubbardArgs, a: &AnsatzArgs, c: &Common) -> Res<Report> {
    let s = build_hubbard(h.sites, h.t, h.u, h.periodic)?.to_core_eigenbasis();
    solve_ucc(&s, a, true, c)
}

pub fn adapt(mol: &MoleculeArgs, epsilon: f64, max_steps: usize) -> Res<Report> {
    let s = load(mol)?;
    let pool = OperatorPool::from_problem(&UCCProblem::uccsd(&s)?);
    let r = adapt_vqe(&s, &pool, epsilon, max_steps)?;
    let fci = exact_energy(&s)?;
    let rows = r
        .energies
        .iter()
        .enumerate()
        .map(|(i, e)| {
            vec![
                i.to_string(),
                num(*e),
                r.gradient_norms.get(i).map_or(String::new(), |g| num(*g)),
                if i == 0 {
                    String::new()
                } else {
                    r.chosen[i - 1].to_string()
                },
            ]
        })
        .collect();
    let json = json!({
        "energies": r.energies,
        "gradient_norms": r.gradient_norms,
        "chosen": r.chosen,
        "ex_ops": r.problem.ex_ops.iter().map(|e| e.indices().to_vec()).collect::<Vec<_>>(),
        "converged": r.converged,
        "fci": fci,
    });
    let mut report = Report::table(json, &["step", "energy", "gradient_norm", "chosen"], rows);
    let last = *r.energies.last().expect("starts with the reference");
    report.text = Some(format!(
        "{}\nfinal energy {last:.10}  fci {fci:.10}  error {:.6} mH  converged {}\n",
        report.render(crate::Format::Text)?.trim_end(),
        (last - fci) * 1e3,
        r.converged
    ));
    Ok(report)
}

pub fn fci(mol: &MoleculeArgs) -> Res<Report> {
    let s = load(mol)?;
    let space = CISpace::new(s.n_orb, s.n_elec)?;
    let e = exact_energy(&s)?;
    let hf = hf_energy(&s);
    let json = json!({"hf": hf, "fci": e, "dim": space.dim()});
    Ok(Report::table(
        json,
        &["hf", "fci", "dim"],
        vec![vec![num(hf), num(e), space.dim().to_string()]],
    ))
}

fn parity_h(s: &IntegralSet) -> Res<QubitOperator> {
    Ok(parity_transform(&build_fermion_hamiltonian(s), s.n_elec, true)?)
}

fn noisy_energy(
    s: &IntegralSet,
    h: &QubitOperator,
    layers: usize,
    p: f64,
    shots: Option<Shots>,
) -> Res<(f64, Vec<f64>)> {
    let n = h.n_qubits();
    let c = build_ry_ansatz(n, layers);
    let init = ry_reference_params(n, layers, &parity_reduced_hf_qubits(s.n_orb, s.n_elec)?);
    let nm = NoiseModel::cnot_depolarizing(p)?;
    let r = hea_kernel(&c, &init, h, Some(&nm), shots.is_none(), shots)?;
    Ok((r.e, r.x))
}

pub fn noisy(mol: &MoleculeArgs, layers: usize, p: f64, shots: Option<u64>, seed: u64) -> Res<Report> {
    let s = load(mol)?;
    let h = parity_h(&s)?;
    let shots = shots.map(|per_term| Shots { per_term, seed });
    let (e, x) = noisy_energy(&s, &h, layers, p, shots)?;
    let fidelity = average_gate_fidelity(&depolarizing_channel(p, 2)?);
    let fci = exact_energy(&s)?;
    let json = json!({
        "energy": e, "params": x, "p": p, "layers": layers, "n_qubits": h.n_qubits(),
        "cnot_fidelity": fidelity, "fci": fci,
    });
    Ok(Report::table(
        json,
        &["p", "layers", "cnot_fidelity", "energy", "fci"],
        vec![vec![p.to_string(), layers.to_string(), num(fidelity), num(e), num(fci)]],
    ))
}

fn parse_basis(entry: &str) -> Res<BasisSpec> {
    let bad = || CliError::Usage(format!("bad basis entry {entry:?}"));
    let f: Vec<&str> = entry.split_whitespace().collect();
    match f.as_slice() {
        [dof, "half_spin"] => Ok(BasisSpec::half_spin(dof)),
        [dof, "sho", omega, nbas] => Ok(BasisSpec::sho(
            dof,
            omega.parse().map_err(|_| bad())?,
            nbas.parse().map_err(|_| bad())?,
        )),
        _ => Err(bad()),
    }
}

fn build_model(d: &DynamicsArgs) -> Res<DynamicsModel> {
    Ok(match d.model {
        ModelKind::SpinBoson => {
            dyn_::spin_boson_model(d.epsilon, d.delta, d.omega.unwrap_or(1.0), d.g.unwrap_or(0.5), d.nbas)?
        }
        ModelKind::Marcus => dyn_::marcus_model(d.v, d.dg, d.omega.unwrap_or(0.5), d.g.unwrap_or(1.0), d.nbas)?,
        ModelKind::Custom => {
            if d.terms.is_empty() || d.basis.is_empty() {
                return Err(CliError::Usage("--model custom needs --terms and --basis".into()));
            }
            let terms = d
                .terms
                .iter()
                .map(|t| SymbolicTerm::parse(t))
                .collect::<civec::Result<Vec<_>>>()?;
            let basis = d.basis.iter().map(|b| parse_basis(b)).collect::<Res<Vec<_>>>()?;
            let initial = basis
                .iter()
                .map(|b| {
                    let mut v = vec![Complex64::new(0.0, 0.0); b.nbas()];
                    v[0] = Complex64::new(1.0, 0.0);
                    v
                })
                .collect();
            DynamicsModel { terms, basis, initial }
        }
    })
}

pub fn dynamics(d: &DynamicsArgs) -> Res<Report> {
    let model = build_model(d)?;
    let enc_kind = match d.encoding {
        EncodingKind::Unary => Encoding::Unary,
        EncodingKind::Binary => Encoding::Binary,
        EncodingKind::Gray => Encoding::Gray,
    };
    let enc = model.encode(enc_kind)?;
    let h = enc.dense_terms()?;
    let psi0 = model.initial_state(enc_kind)?;
    let vha = dyn_::build_vha(&enc, d.layers, psi0.clone())?;
    let spins: Vec<String> = model
        .basis
        .iter()
        .filter(|b| b.kind == dyn_::BasisKind::HalfSpin)
        .map(|b| b.dof.clone())
        .collect();
    let mut obs = spins
        .iter()
        .map(|s| model.sigma_z(s, enc_kind))
        .collect::<civec::Result<Vec<_>>>()?;
    obs.push(enc.to_dense()?);
    let integrator = match d.integrator {
        IntegratorKind::Euler => Integrator::Euler,
        IntegratorKind::Rk4 => Integrator::Rk4,
    };
    let theta0 = vec![0.0; vha.n_params()];
    let traj = dyn_::time_evolve(&h, &vha, &theta0, d.t_final, d.tau, integrator, &obs)?;
    let mut names: Vec<String> = spins.iter().map(|s| format!("sz_{s}")).collect();
    names.push("energy".into());
    let exact: Vec<Vec<f64>> = if d.exact {
        let states = dyn_::exact_propagate(&h, &psi0, &traj.times)?;
        obs[..spins.len()]
            .iter()
            .map(|o| dyn_::observable_series(&states, o))
            .collect()
    } else {
        Vec::new()
    };
    let mut headers = vec!["t".to_string()];
    headers.extend((0..vha.n_params()).map(|k| format!("theta_{k}")));
    headers.extend(names.iter().cloned());
    headers.extend(spins.iter().take(exact.len()).map(|s| format!("exact_sz_{s}")));
    let rows = (0..traj.times.len())
        .map(|i| {
            let mut r = vec![num(traj.times[i])];
            r.extend(traj.thetas[i].iter().map(|x| num(*x)));
            r.extend(traj.observables[i].iter().map(|x| num(*x)));
            r.extend(exact.iter().map(|col| num(col[i])));
            r
        })
        .collect();
    let mut observables = serde_json::Map::new();
    for (k, name) in names.iter().enumerate() {
        observables.insert(
            name.clone(),
            json!(traj.observables.iter().map(|o| o[k]).collect::<Vec<_>>()),
        );
    }
    for (s, col) in spins.iter().zip(&exact) {
        observables.insert(format!("exact_sz_{s}"), json!(col));
    }
    let json = json!({
        "n_qubits": enc.n_qubits(),
        "n_params": vha.n_params(),
        "times": traj.times,
        "thetas": traj.thetas,
        "observables": observables,
    });
    Ok(Report {
        json,
        headers,
        rows,
        text: None,
    })
}

pub fn convert(mol: &MoleculeArgs, to: ConvertTarget) -> Res<Report> {
    let s = load(mol)?;
    let f = build_fermion_hamiltonian(&s);
    let text = match to {
        ConvertTarget::Fermion => f.to_string(),
        ConvertTarget::Jw => jordan_wigner(&f)?.to_string(),
        ConvertTarget::Parity => parity_transform(&f, s.n_elec, false)?.to_string(),
        ConvertTarget::ParityReduced => parity_transform(&f, s.n_elec, true)?.to_string(),
        ConvertTarget::Fcidump => write_fcidump(&s),
    };
    let rows = text.lines().map(|l| vec![l.to_string()]).collect();
    let mut r = Report::table(json!({ "text": text }), &["line"], rows);
    r.text = Some(if text.ends_with('\n') { text } else { text + "\n" });
    Ok(r)
}

fn need_fcidump(s: &SweepArgs) -> Res<IntegralSet> {
    let path = s
        .fcidump
        .first()
        .ok_or_else(|| CliError::Usage("this sweep needs --fcidump".into()))?;
    read_integrals(path)
}

fn or_default(values: &[f64], default: impl Fn() -> Vec<f64>) -> Vec<f64> {
    if values.is_empty() {
        default()
    } else {
        values.to_vec()
    }
}

fn uccsd_row(s: &IntegralSet) -> Res<(f64, f64, f64)> {
    let p = UCCProblem::uccsd(s)?;
    let r = kernel_with(&p, &LbfgsOptions::default())?;
    Ok((hf_energy(s), r.e, exact_energy(s)?))
}

pub fn sweep(a: &SweepArgs, seed: u64) -> Res<Report> {
    let layers = if a.layers.is_empty() { vec![1] } else { a.layers.clone() };
    match a.axis {
        Axis::Bond => {
            if a.fcidump.is_empty() {
                return Err(CliError::Usage("bond sweep needs one or more --fcidump files".into()));
            }
            let res = a
                .fcidump
                .par_iter()
                .map(|p| uccsd_row(&read_integrals(p)?))
                .collect::<Res<Vec<_>>>()?;
            let mut rows = Vec::new();
            let mut js = Vec::new();
            for (p, (hf, ucc, fci)) in a.fcidump.iter().zip(res) {
                let name = p.display().to_string();
                rows.push(vec![name.clone(), num(hf), num(ucc), num(fci), num((ucc - fci) * 1e3)]);
                js.push(json!({"file": name, "hf": hf, "ucc": ucc, "fci": fci}));
            }
            Ok(Report::table(
                json!(js),
                &["file", "hf", "ucc", "fci", "error_mh"],
                rows,
            ))
        }
        Axis::U => {
            let us = or_default(&a.values, || (0..=8).map(|i| i as f64).collect());
            let res = us
                .par_iter()
                .map(|&u| uccsd_row(&build_hubbard(a.sites, a.t, u, false)?.to_core_eigenbasis()))
                .collect::<Res<Vec<_>>>()?;
            let rows = us
                .iter()
                .zip(&res)
                .map(|(u, (hf, ucc, fci))| vec![num(u / a.t), num(*hf), num(*ucc), num(*fci)])
                .collect();
            let js: Vec<Value> = us
                .iter()
                .zip(&res)
                .map(|(u, (hf, ucc, fci))| json!({"u_over_t": u / a.t, "hf": hf, "ucc": ucc, "fci": fci}))
                .collect();
            Ok(Report::table(json!(js), &["u_over_t", "hf", "ucc", "fci"], rows))
        }
        Axis::NoiseP => {
            let s = need_fcidump(a)?;
            let h = parity_h(&s)?;
            let ps = or_default(&a.values, || (0..=8).map(|i| 0.1 * i as f64).collect());
            let grid: Vec<(f64, usize)> = ps.iter().flat_map(|&p| layers.iter().map(move |&l| (p, l))).collect();
            let es = grid
                .par_iter()
                .map(|&(p, l)| Ok(noisy_energy(&s, &h, l, p, None)?.0))
                .collect::<Res<Vec<f64>>>()?;
            let mut headers = vec!["p".to_string()];
            headers.extend(layers.iter().map(|l| format!("energy_l{l}")));
            let rows: Vec<Vec<String>> = ps
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let mut r = vec![num(*p)];
                    r.extend(es[i * layers.len()..(i + 1) * layers.len()].iter().map(|e| num(*e)));
                    r
                })
                .collect();
            let js = json!({"p": ps, "layers": layers, "energies": es.chunks(layers.len()).collect::<Vec<_>>()});
            let h: Vec<&str> = headers.iter().map(String::as_str).collect();
            Ok(Report::table(js, &h, rows))
        }
        Axis::Shots => {
            let s = need_fcidump(a)?;
            let h = parity_h(&s)?;
            let n = h.n_qubits();
            let l = layers[0];
            let c = build_ry_ansatz(n, l);
            let init = ry_reference_params(n, l, &parity_reduced_hf_qubits(s.n_orb, s.n_elec)?);
            let opt = hea_kernel(&c, &init, &h, None, true, None)?;
            let counts = or_default(&a.values, || (8..=13).map(|e| (1u64 << e) as f64).collect());
            let repeats = a.repeats;
            if repeats < 2 {
                return Err(CliError::Usage("--repeats must be at least 2".into()));
            }
            let stats = counts
                .par_iter()
                .enumerate()
                .map(|(i, &shots)| {
                    let samples = (0..repeats)
                        .map(|r| {
                            let sh = Shots {
                                per_term: shots as u64,
                                seed: seed.wrapping_mul(1_000_003).wrapping_add((i * repeats + r) as u64),
                            };
                            Ok(circuit_energy(&c, &opt.x, &h, None, Some(sh))?)
                        })
                        .collect::<Res<Vec<f64>>>()?;
                    let mean = samples.iter().sum::<f64>() / repeats as f64;
                    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (repeats - 1) as f64;
                    Ok((mean, var.sqrt()))
                })
                .collect::<Res<Vec<_>>>()?;
            let lx: Vec<f64> = counts.iter().map(|c| c.ln()).collect();
            let ly: Vec<f64> = stats.iter().map(|s| s.1.ln()).collect();
            let slope = -dyn_::rate_fit(&lx, &ly, (f64::NEG_INFINITY, f64::INFINITY)).unwrap_or(f64::NAN);
            let rows = counts
                .iter()
                .zip(&stats)
                .map(|(c, (m, sd))| vec![format!("{c}"), num(*m), num(*sd), num(opt.e)])
                .collect();
            let js = json!({
                "shots": counts, "mean": stats.iter().map(|s| s.0).collect::<Vec<_>>(),
                "std": stats.iter().map(|s| s.1).collect::<Vec<_>>(), "exact": opt.e, "loglog_slope": slope,
            });
            Ok(Report::table(js, &["shots", "mean", "std", "exact"], rows))
        }
        Axis::Dg => {
            let dgs = or_default(&a.values, || (0..=8).map(|i| -0.25 * i as f64).collect());
            let l = if a.layers.is_empty() { 3 } else { layers[0] };
            let (v, omega, g) = (-0.1, 0.5, 1.0);
            let rates = dgs
                .par_iter()
                .map(|&dg| marcus_rate(v, dg, omega, g, a.nbas, l, a.tau, a.t_final, a.exact))
                .collect::<Res<Vec<f64>>>()?;
            let lambda = 2.0 * g * g * omega;
            let beta = dyn_::fit_marcus_beta(v, lambda, &dgs, &rates, 0.05, 50.0)?;
            let theory = dgs
                .iter()
                .map(|dg| dyn_::marcus_rate_theory(v, lambda, *dg, beta))
                .collect::<civec::Result<Vec<f64>>>()?;
            let rows = dgs
                .iter()
                .zip(&rates)
                .zip(&theory)
                .map(|((d, k), t)| vec![num(*d), num(*k), num(*t)])
                .collect();
            let js = json!({"dg": dgs, "rate": rates, "theory": theory, "beta": beta, "lambda": lambda});
            Ok(Report::table(js, &["dg", "rate", "theory"], rows))
        }
    }
}

/// Charge-transfer rate fitted over `t ∈ [2, 8]`.
#[allow(clippy::too_many_arguments)]
pub fn marcus_rate(
    v: f64,
    dg: f64,
    omega: f64,
    g: f64,
    nbas: usize,
    layers: usize,
    tau: f64,
    t_final: f64,
    exact: bool,
) -> Res<f64> {
    let m = dyn_::marcus_model(v, dg, omega, g, nbas)?;
    let enc = m.encode(Encoding::Gray)?;
    let h = enc.dense_terms()?;
    let psi0 = m.initial_state(Encoding::Gray)?;
    let sz = m.sigma_z("charge", Encoding::Gray)?;
    let (times, sz_t) = if exact {
        let n = (t_final / tau).round() as usize;
        let times: Vec<f64> = (0..=n).map(|i| i as f64 * tau).collect();
        let states = dyn_::exact_propagate(&h, &psi0, &times)?;
        let series = dyn_::observable_series(&states, &sz);
        (times, series)
    } else {
        let vha = dyn_::build_vha(&enc, layers, psi0)?;
        let th = vec![0.0; vha.n_params()];
        let tr = dyn_::time_evolve(&h, &vha, &th, t_final, tau, Integrator::Rk4, &[sz])?;
        let series = tr.observables.iter().map(|o| o[0]).collect();
        (tr.times, series)
    };
    let n0: Vec<f64> = sz_t.iter().map(|z| 0.5 * (1.0 + z)).collect();
    Ok(dyn_::rate_fit(&times, &n0, (2.0, 8.0))?)
}
