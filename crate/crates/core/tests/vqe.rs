use civec::ansatz::UCCProblem;
use civec::civector::{fci_ground_state, CISpace};
use civec::integrals::{hf_energy, parse_fcidump, IntegralSet};
use civec::vqe::*;
use civec::Error;

fn fixture(name: &str) -> IntegralSet {
    let path = format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"));
    parse_fcidump(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn fci(s: &IntegralSet) -> f64 {
    fci_ground_state(&CISpace::new(s.n_orb, s.n_elec).unwrap(), s)
        .unwrap()
        .0
}

#[test]
fn h2_optimum() {
    let p = UCCProblem::uccsd(&fixture("h2_sto3g.fcidump")).unwrap();
    let r = kernel(&p).unwrap();
    assert!((r.e - -1.1372744055294384).abs() < 1e-8, "{}", r.e);
    assert!((r.x[1] - -0.112986561).abs() < 1e-6);
    assert!(r.x[0].abs() < 1e-6);
    assert!(r.converged);
    assert_eq!(r.message, "CONVERGENCE: NORM_OF_PROJECTED_GRADIENT_<=_PGTOL");
    assert!(r.grad_at_opt.iter().all(|g| g.abs() <= 1e-9));
}

#[test]
fn h4_optimum_close_to_fci() {
    let s = fixture("h4_sto3g.fcidump");
    let r = kernel(&UCCProblem::uccsd(&s).unwrap()).unwrap();
    assert!((r.e - -2.16755).abs() < 5e-5, "{}", r.e);
    let err_mh = (r.e - fci(&s)) * 1000.0;
    assert!((0.0..0.05).contains(&err_mh), "{err_mh}");
}

#[test]
fn empty_ansatz_returns_hf() {
    let s = fixture("h4_sto3g.fcidump");
    let p = UCCProblem::new(s.clone(), vec![], vec![], vec![], false).unwrap();
    let r = kernel(&p).unwrap();
    assert!((r.e - hf_energy(&s)).abs() < 1e-10);
    assert_eq!(r.nit, 0);
}

#[test]
fn kernel_is_deterministic() {
    let p = UCCProblem::uccsd(&fixture("h4_sto3g.fcidump")).unwrap();
    let a = kernel(&p).unwrap();
    let b = kernel(&p).unwrap();
    assert_eq!(a.x, b.x);
    assert_eq!(a.e.to_bits(), b.e.to_bits());
}

#[test]
fn variational_bounds_on_fixtures() {
    for name in ["h2_sto3g.fcidump", "h4_sto3g.fcidump", "h6_sto3g.fcidump"] {
        let s = fixture(name);
        let r = kernel(&UCCProblem::uccsd(&s).unwrap()).unwrap();
        assert!(hf_energy(&s) >= r.e && r.e >= fci(&s) - 1e-9, "{name}");
    }
}

#[test]
fn evaluation_helpers() {
    let p = UCCProblem::uccsd(&fixture("h2_sto3g.fcidump")).unwrap();
    assert!((energy_at(&p, &[0.0, 0.0]).unwrap() - hf_energy(&p.integrals)).abs() < 1e-12);
    let x = [0.0, -0.112986561];
    assert!((energy_at(&p, &x).unwrap() - -1.137274).abs() < 1e-6);
    let v = civector_at(&p, &x).unwrap();
    let expect = [0.99362, 0.0, 0.0, -0.11275];
    for (a, b) in v.amplitudes.iter().zip(expect) {
        assert!((a - b).abs() < 1e-5);
    }
    let psi = statevector_at(&p, &x).unwrap();
    assert_eq!(psi.len(), 16);
    assert!((psi.iter().map(|c| c.norm_sqr()).sum::<f64>() - 1.0).abs() < 1e-12);
    assert!(matches!(energy_at(&p, &[0.0]), Err(Error::InvalidParams(_))));
}

#[test]
fn paired_statevector_matches_full_space() {
    let s = fixture("h4_sto3g.fcidump");
    let p = UCCProblem::puccd(&s).unwrap();
    let x = [0.1, -0.2, 0.05, 0.3];
    let full = UCCProblem::new(
        s.clone(),
        p.ex_ops.clone(),
        p.param_ids.clone(),
        p.init_guess.clone(),
        false,
    )
    .unwrap();
    let a = civector_at(&p, &x).unwrap();
    let b = civector_at(&full, &x).unwrap();
    for (u, v) in a.amplitudes.iter().zip(&b.amplitudes) {
        assert!((u - v).abs() < 1e-12);
    }
}

#[test]
fn h2_summary() {
    let s = fixture("h2_sto3g.fcidump");
    let p = UCCProblem::uccsd(&s).unwrap();
    let r = kernel(&p).unwrap();
    let e_fci = fci(&s);
    let (rep, text) = print_summary(&p, &r, Some(e_fci)).unwrap();
    let configs: Vec<_> = rep
        .excitations
        .iter()
        .map(|x| (x.excitation.clone(), x.configuration.clone()))
        .collect();
    assert_eq!(
        configs,
        vec![
            (vec![3, 2], "1001".to_string()),
            (vec![1, 0], "0110".to_string()),
            (vec![1, 3, 2, 0], "1010".to_string())
        ]
    );
    assert_eq!((rep.n_qubits, rep.n_params, rep.n_excitations), (4, 2, 3));
    let ucc = rep.energies.iter().find(|r| r.method == "UCC").unwrap();
    assert!((ucc.correlation_pct.unwrap() - 100.0).abs() < 1e-3);
    let hf = &rep.energies[0];
    assert_eq!(hf.correlation_pct.unwrap(), 0.0);
    assert!((hf.error_mh.unwrap() - 20.568268).abs() < 1e-5);
    let mp2 = rep.energies.iter().find(|r| r.method == "MP2").unwrap();
    assert!((mp2.correlation_pct.unwrap() - 63.989).abs() < 1e-3);
    for row in &rep.energies {
        assert_eq!(row.error_mh.unwrap(), (row.energy - e_fci) * 1000.0);
    }
    for header in ["Ansatz", "Energy", "Excitations", "Optimization Result"] {
        assert!(text.contains(&format!(" {header} ")));
    }
}

#[test]
fn json_record_schema() {
    let s = fixture("h2_sto3g.fcidump");
    let p = UCCProblem::uccsd(&s).unwrap();
    let r = kernel(&p).unwrap();
    let json: serde_json::Value = serde_json::from_str(&VqeRecord::new(&p, &r, Some(fci(&s))).to_json()).unwrap();
    for key in [
        "energies",
        "params",
        "ex_ops",
        "param_ids",
        "nit",
        "converged",
        "wall_time_s",
    ] {
        assert!(json.get(key).is_some(), "{key}");
    }
    for key in ["hf", "mp2", "ucc", "fci"] {
        assert!(json["energies"][key].is_f64(), "{key}");
    }
    assert_eq!(json["ex_ops"][2], serde_json::json!([1, 3, 2, 0]));
    assert!(json["wall_time_s"].is_null());
}
