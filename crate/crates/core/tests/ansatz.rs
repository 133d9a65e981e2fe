use civec::ansatz::*;
use civec::civector::{fci_ground_state, CIHamiltonian, CISpace, CiModel, Excitation, UccCircuit};
use civec::integrals::{hf_energy, mp2, parse_fcidump, IntegralSet};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fixture(name: &str) -> IntegralSet {
    let path = format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"));
    parse_fcidump(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn tuples(ops: &[Excitation]) -> Vec<Vec<usize>> {
    ops.iter().map(|e| e.indices().to_vec()).collect()
}

fn full_energy(s: &IntegralSet, ops: &[Excitation], ids: &[usize], params: &[f64]) -> f64 {
    let h = CIHamiltonian::from_integrals(s).unwrap();
    let c = UccCircuit::new(&h, ops, ids).unwrap();
    c.energy_and_gradient(&h, params, &h.reference_state()).unwrap().0
}

/// Lowest eigenvalue of the full Hamiltonian restricted to determinants
/// with identical alpha and beta occupations.
fn seniority_zero_ground(s: &IntegralSet) -> f64 {
    let h = CIHamiltonian::from_integrals(s).unwrap();
    let dense = h.dense().unwrap();
    let space = CISpace::new(s.n_orb, s.n_elec).unwrap();
    let n = s.n_orb;
    let keep: Vec<usize> = (0..space.dim())
        .filter(|&i| {
            let d = space.det(i);
            d >> n == d & ((1u128 << n) - 1)
        })
        .collect();
    let sub = DMatrix::from_fn(keep.len(), keep.len(), |i, j| dense[(keep[i], keep[j])]);
    SymmetricEigen::new(sub).eigenvalues.min()
}

#[test]
fn h2_mp2_initial_guess() {
    let p = UCCProblem::uccsd(&fixture("h2_sto3g.fcidump")).unwrap();
    assert_eq!(tuples(&p.ex_ops), vec![vec![3, 2], vec![1, 0], vec![1, 3, 2, 0]]);
    assert_eq!(p.param_ids, vec![0, 0, 1]);
    assert_eq!(p.init_guess[0], 0.0);
    assert!((p.init_guess[1] - -0.07260814651571333).abs() < 1e-8);
}

#[test]
fn h4_counts_after_screening() {
    let s = fixture("h4_sto3g.fcidump");
    let (raw, raw_ids) = generate_uccsd(4, 4);
    assert_eq!((raw.len(), raw_ids.iter().max().unwrap() + 1), (26, 15));
    let p = UCCProblem::uccsd(&s).unwrap();
    assert_eq!(p.ex_ops.len(), 18);
    assert_eq!(p.n_params(), 11);
    assert_eq!(OperatorPool::from_problem(&p).len(), 11);
}

#[test]
fn doubles_sorted_by_amplitude() {
    let p = UCCProblem::uccsd(&fixture("h4_sto3g.fcidump")).unwrap();
    let doubles: Vec<f64> = p
        .groups()
        .iter()
        .filter(|g| p.ex_ops[g[0]].rank() == 2)
        .map(|g| p.init_guess[p.param_ids[g[0]]].abs())
        .collect();
    assert!(doubles.windows(2).all(|w| w[0] >= w[1]));
    assert!(doubles.iter().all(|&t| t >= DEFAULT_SCREEN_EPS));
}

#[test]
fn infinite_screening_leaves_singles_only() {
    let s = fixture("h4_sto3g.fcidump");
    let (ops, ids) = generate_uccsd(4, 4);
    let base = UCCProblem::new(s.clone(), ops, ids, vec![0.0; 15], false).unwrap();
    let t2 = mp2(&s).unwrap();
    let p = mp2_initialize(&base, &t2, f64::INFINITY, true);
    assert!(p.ex_ops.iter().all(|e| e.rank() == 1));
    let e = full_energy(&s, &p.ex_ops, &p.param_ids, &p.init_guess);
    assert!((e - hf_energy(&s)).abs() < 1e-10);
}

#[test]
fn no_screening_no_sort_keeps_order() {
    let s = fixture("h4_sto3g.fcidump");
    let (ops, ids) = generate_uccsd(4, 4);
    let base = UCCProblem::new(s.clone(), ops.clone(), ids.clone(), vec![0.0; 15], false).unwrap();
    let p = mp2_initialize(&base, &mp2(&s).unwrap(), 0.0, false);
    assert_eq!(p.ex_ops, ops);
    assert_eq!(p.param_ids, ids);
}

#[test]
fn zero_parameters_give_hf() {
    for name in ["h2_sto3g.fcidump", "h4_sto3g.fcidump", "h6_sto3g.fcidump"] {
        let s = fixture(name);
        let p = UCCProblem::uccsd(&s).unwrap();
        let e = full_energy(&s, &p.ex_ops, &p.param_ids, &vec![0.0; p.n_params()]);
        assert!((e - hf_energy(&s)).abs() < 1e-9, "{name}");
    }
}

#[test]
fn pool_matches_parameter_partition() {
    let pool = build_operator_pool(2, 2);
    assert_eq!(pool.groups.iter().map(Vec::len).collect::<Vec<_>>(), vec![2, 1]);
    let (_, ids) = generate_uccsd(4, 4);
    assert_eq!(build_operator_pool(4, 4).len(), ids.iter().max().unwrap() + 1);
    assert!(build_operator_pool(4, 4).groups.iter().all(|g| !g.is_empty()));
}

#[test]
fn generated_excitations_conserve_spin() {
    for (n, m) in [(2, 2), (4, 4), (6, 6), (5, 4)] {
        for e in generate_uccsd(n, m).0 {
            e.validate(n).unwrap();
        }
        for e in generate_kupccgsd(n, 2).0 {
            e.validate(n).unwrap();
        }
    }
}

#[test]
fn kupccgsd_layers_are_independent() {
    let count_doubles = |k| {
        let (ops, ids) = generate_kupccgsd(4, k);
        let mut d: Vec<usize> = ops
            .iter()
            .zip(&ids)
            .filter(|(e, _)| e.rank() == 2)
            .map(|(_, &i)| i)
            .collect();
        d.dedup();
        d.len()
    };
    assert_eq!(count_doubles(2), 2 * count_doubles(1));
    let (ops, ids) = generate_kupccgsd(2, 1);
    assert_eq!(ops.iter().filter(|e| e.rank() == 2).count(), 1);
    assert_eq!(ids, vec![0, 0, 1]);
}

#[test]
fn kupccgsd_initial_guess_is_seeded() {
    let s = fixture("h4_sto3g.fcidump");
    let a = UCCProblem::kupccgsd(&s, 1, 7).unwrap();
    let b = UCCProblem::kupccgsd(&s, 1, 7).unwrap();
    assert_eq!(a.init_guess, b.init_guess);
    assert!(a.init_guess.iter().all(|x| x.abs() <= KUPCCGSD_NOISE && *x != 0.0));
}

#[test]
fn puccd_h4_tuples() {
    let (ops, ids) = generate_puccd(4, 4);
    assert_eq!(
        tuples(&ops),
        vec![vec![6, 2, 0, 4], vec![7, 3, 0, 4], vec![6, 2, 1, 5], vec![7, 3, 1, 5]]
    );
    assert_eq!(ids, vec![0, 1, 2, 3]);
    assert_eq!(generate_puccd(6, 4).0.len(), 2 * 4);
}

#[test]
fn puccd_full_space_matches_paired_space() {
    let s = fixture("h4_sto3g.fcidump");
    let p = UCCProblem::puccd(&s).unwrap();
    let paired = PairedModel::new(&s).unwrap();
    let circuit = UccCircuit::new(&paired, &p.ex_ops, &p.param_ids).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let x: Vec<f64> = (0..4).map(|_| rng.random_range(-0.5..0.5)).collect();
        let e_pair = circuit
            .energy_and_gradient(&paired, &x, &paired.reference_state())
            .unwrap()
            .0;
        let e_full = full_energy(&s, &p.ex_ops, &p.param_ids, &x);
        assert!((e_pair - e_full).abs() < 1e-10, "{e_pair} vs {e_full}");
    }
}

#[test]
fn paired_hamiltonian_is_seniority_zero_block() {
    for name in ["h2_sto3g.fcidump", "h4_sto3g.fcidump"] {
        let s = fixture(name);
        let oracle = seniority_zero_ground(&s);
        let (e, _) = PairedModel::new(&s).unwrap().ground_state().unwrap();
        assert!((e - oracle).abs() < 1e-9, "{name}: {e} vs {oracle}");
        let q = build_puccd_hamiltonian(&s).to_qubit_operator().unwrap();
        let m = q.to_dense_matrix().unwrap().map(|c| c.re);
        let all = SymmetricEigen::new(m).eigenvalues;
        // the qubit form spans every pair number, so its minimum can only be lower
        assert!(all.min() <= e + 1e-9);
        let space = CISpace::new(s.n_orb, s.n_elec).unwrap();
        let (e_fci, _) = fci_ground_state(&space, &s).unwrap();
        assert!(e_fci <= e + 1e-12 && e <= hf_energy(&s) + 1e-12);
    }
}

#[test]
fn paired_qubit_operator_matches_model_in_fixed_pair_sector() {
    let s = fixture("h4_sto3g.fcidump");
    let model = PairedModel::new(&s).unwrap();
    let q = build_puccd_hamiltonian(&s).to_qubit_operator().unwrap();
    let m = q.to_dense_matrix().unwrap();
    // orbital p sits on qubit n-1-p, which is bit p of the dense index
    let basis = |bits: u64| bits as usize;
    let strings = model.strings().to_vec();
    for (i, &a) in strings.iter().enumerate() {
        let mut unit = vec![0.0; strings.len()];
        unit[i] = 1.0;
        let col = model.apply_hamiltonian(&unit);
        for (j, &b) in strings.iter().enumerate() {
            assert!((m[(basis(b), basis(a))].re - col[j]).abs() < 1e-12);
        }
    }
}

#[test]
fn diagonal_integrals_give_classical_paired_operator() {
    let mut s = IntegralSet::zeros(3, 2);
    for p in 0..3 {
        s.int1e[(p, p)] = p as f64 - 1.0;
        for q in 0..3 {
            s.set_eri(p, p, q, q, 0.3 + 0.1 * (p + q) as f64);
        }
    }
    let q = build_puccd_hamiltonian(&s).to_qubit_operator().unwrap();
    assert!(q.raw_terms().all(|(k, _)| k.x == 0));
}

#[test]
fn puccd_energy_bounds_on_h4() {
    let s = fixture("h4_sto3g.fcidump");
    let p = UCCProblem::puccd(&s).unwrap();
    let r = civec::vqe::kernel(&p).unwrap();
    let doci = seniority_zero_ground(&s);
    assert!(r.e >= doci - 1e-9);
    assert!(r.e < hf_energy(&s));
    let e_full = full_energy(&s, &p.ex_ops, &p.param_ids, &r.x);
    assert!((r.e - e_full).abs() < 1e-6);
}

#[test]
fn ansatz_file_round_trip_h4() {
    let s = fixture("h4_sto3g.fcidump");
    let p = UCCProblem::uccsd(&s).unwrap();
    let back = UCCProblem::from_ansatz_text(&s, &p.to_ansatz_text(), false).unwrap();
    assert_eq!(back, p);
}

#[test]
fn adapt_stops_immediately_for_large_epsilon() {
    let s = fixture("h4_sto3g.fcidump");
    let r = adapt_vqe(&s, &build_operator_pool(4, 4), 1e6, 10).unwrap();
    assert_eq!(r.energies, vec![hf_energy(&s)]);
    assert!(r.problem.ex_ops.is_empty());
    assert!(r.converged);
}

#[test]
fn adapt_h4_reaches_fci() {
    let s = fixture("h4_sto3g.fcidump");
    let space = CISpace::new(4, 4).unwrap();
    let (e_fci, _) = fci_ground_state(&space, &s).unwrap();
    let r = adapt_vqe(&s, &build_operator_pool(4, 4), 1e-3, 30).unwrap();
    let last = *r.energies.last().unwrap();
    assert!(r.converged);
    assert!((last - e_fci).abs() < 1e-3, "{last} vs {e_fci}");
    assert!(r.energies.windows(2).all(|w| w[1] <= w[0] + 1e-9));
}

#[test]
fn adapt_rejects_nonpositive_epsilon() {
    let s = fixture("h2_sto3g.fcidump");
    assert!(adapt_vqe(&s, &build_operator_pool(2, 2), 0.0, 5).is_err());
}
