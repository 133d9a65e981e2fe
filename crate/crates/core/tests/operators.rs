use civec::integrals::{
    build_fermion_hamiltonian, build_hubbard, hf_energy, mp2, parse_fcidump, write_fcidump, IntegralSet,
};
use civec::operator::{jordan_wigner, parity_transform, FermionOperator, Ladder, Pauli, QubitOperator};
use civec::Complex64;
use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;

fn fixture(name: &str) -> IntegralSet {
    let path = format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"));
    parse_fcidump(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn spectrum(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut e: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

/// Dense matrix of a single ladder operator built directly from occupation
/// bitstrings, independent of the Pauli machinery.
fn dense_ladder(n: usize, l: Ladder) -> DMatrix<Complex64> {
    let dim = 1 << n;
    let mut m = DMatrix::zeros(dim, dim);
    for b in 0..dim {
        let occ = b >> l.index & 1 == 1;
        let create = l.kind == civec::operator::LadderKind::Create;
        if occ == create {
            continue;
        }
        let sign = if (b & ((1 << l.index) - 1)).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        m[(b ^ (1 << l.index), b)] = Complex64::new(sign, 0.0);
    }
    m
}

fn dense_fermion(op: &FermionOperator) -> DMatrix<Complex64> {
    let n = op.n_spin_orbitals();
    let dim = 1 << n;
    let mut out = DMatrix::zeros(dim, dim);
    for t in op.terms() {
        let mut m = DMatrix::<Complex64>::identity(dim, dim);
        for &l in &t.factors {
            m *= dense_ladder(n, l);
        }
        out += m * Complex64::new(t.coefficient, 0.0);
    }
    out
}

#[test]
fn h2_qubit_coefficients() {
    let h = build_fermion_hamiltonian(&fixture("h2_sto3g.fcidump"));
    let q = jordan_wigner(&h).unwrap();
    assert!((q.constant().re - -0.09835117053027564).abs() < 1e-9);
    let xxxx = q
        .coefficient(&[(0, Pauli::X), (1, Pauli::X), (2, Pauli::X), (3, Pauli::X)])
        .unwrap();
    assert!((xxxx.re - 0.04531660419443148).abs() < 1e-9);
    assert!(q.is_hermitian(1e-12));
    assert!(q.raw_terms().all(|(_, c)| c.im.abs() < 1e-12));
}

#[test]
fn h2_fermion_coefficients() {
    let h = build_fermion_hamiltonian(&fixture("h2_sto3g.fcidump"));
    let k = [
        Ladder::create(0),
        Ladder::create(1),
        Ladder::annihilate(0),
        Ladder::annihilate(1),
    ];
    assert!((h.coefficient(&k) - -0.48227117798977825).abs() < 1e-9);
    assert!((h.coefficient(&[Ladder::create(0), Ladder::annihilate(0)]) - -1.2527052599711868).abs() < 1e-9);
}

#[test]
fn h2_parity_reduced_ground_state() {
    let h = build_fermion_hamiltonian(&fixture("h2_sto3g.fcidump"));
    let jw = spectrum(&jordan_wigner(&h).unwrap().to_dense_matrix().unwrap());
    let red = parity_transform(&h, 2, true).unwrap();
    assert_eq!(red.n_qubits(), 2);
    let e = spectrum(&red.to_dense_matrix().unwrap());
    assert!((e[0] - jw[0]).abs() < 1e-9);
    assert!((e[0] - -1.137274).abs() < 1e-6);
}

#[test]
fn jw_matches_bitstring_construction() {
    let h = build_fermion_hamiltonian(&fixture("h2_sto3g.fcidump"));
    let a = jordan_wigner(&h).unwrap().to_dense_matrix().unwrap();
    let b = dense_fermion(&h);
    assert!((a - b).norm() < 1e-10);
}

#[test]
fn hopping_pair_matches_brute_force() {
    let mut op = FermionOperator::new(2);
    op.add_term(&[Ladder::create(1), Ladder::annihilate(0)], 1.0).unwrap();
    op.add_term(&[Ladder::create(0), Ladder::annihilate(1)], 1.0).unwrap();
    let q = jordan_wigner(&op).unwrap();
    assert!((q.to_dense_matrix().unwrap() - dense_fermion(&op)).norm() < 1e-12);
}

#[test]
fn jw_anticommutation() {
    let n = 5;
    let dim = 1 << n;
    let single = |l: Ladder| {
        let mut op = FermionOperator::new(n);
        op.add_term(&[l], 1.0).unwrap();
        jordan_wigner(&op).unwrap().to_dense_matrix().unwrap()
    };
    for i in 0..n {
        let a = single(Ladder::annihilate(i));
        for j in 0..n {
            let ad = single(Ladder::create(j));
            let anti = &a * &ad + &ad * &a;
            let expect = if i == j {
                DMatrix::identity(dim, dim)
            } else {
                DMatrix::zeros(dim, dim)
            };
            assert!((anti - expect).norm() < 1e-12, "{{a_{i}, a†_{j}}}");
            let aj = single(Ladder::annihilate(j));
            assert!((&a * &aj + &aj * &a).norm() < 1e-12);
        }
    }
}

#[test]
fn parity_number_operator_matches_basis_change() {
    let n = 4;
    let mut op = FermionOperator::new(n);
    for p in 0..n {
        op.add_term(&[Ladder::create(p), Ladder::annihilate(p)], 1.0).unwrap();
    }
    let jw = dense_fermion(&op);
    let par = parity_transform(&op, 2, false).unwrap().to_dense_matrix().unwrap();
    // occupation b maps to parity bits p_t = b_0 ^ ... ^ b_t
    let dim = 1 << n;
    let to_parity = |b: usize| {
        (0..n).fold(0, |acc, t| {
            acc | ((((b & ((2 << t) - 1)).count_ones() & 1) as usize) << t)
        })
    };
    let mut perm = DMatrix::<Complex64>::zeros(dim, dim);
    for b in 0..dim {
        perm[(to_parity(b), b)] = Complex64::new(1.0, 0.0);
    }
    let expect = &perm * jw * perm.transpose();
    assert!((par - expect).norm() < 1e-12);
}

#[test]
fn hubbard_parity_and_jw_spectra_agree() {
    let s = build_hubbard(2, 1.0, 3.0, false).unwrap();
    let h = build_fermion_hamiltonian(&s);
    let a = spectrum(&jordan_wigner(&h).unwrap().to_dense_matrix().unwrap());
    let b = spectrum(&parity_transform(&h, 2, false).unwrap().to_dense_matrix().unwrap());
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-10);
    }
}

#[test]
fn fixtures_reference_energies() {
    let h2 = fixture("h2_sto3g.fcidump");
    assert!((hf_energy(&h2) - -1.116706).abs() < 1e-5);
    let m = mp2(&h2).unwrap();
    assert!((hf_energy(&h2) + m.e_corr - -1.129868).abs() < 1e-5);
    assert!((m.t2(0, 0, 0, 0) - -0.072608).abs() < 1e-4);
    for name in ["h4_sto3g.fcidump", "h6_sto3g.fcidump", "h8_sto3g.fcidump"] {
        let s = fixture(name);
        s.validate().unwrap();
        assert!(mp2(&s).unwrap().e_corr <= 0.0);
    }
}

#[test]
fn fcidump_round_trips() {
    for s in [
        fixture("h2_sto3g.fcidump"),
        fixture("h4_sto3g.fcidump"),
        build_hubbard(4, 1.0, 2.0, true).unwrap(),
    ] {
        let back = parse_fcidump(&write_fcidump(&s)).unwrap();
        assert_eq!(back.n_orb, s.n_orb);
        assert!((back.int1e.clone() - s.int1e.clone()).amax() < 1e-12);
        assert!(back.int2e.iter().zip(&s.int2e).all(|(a, b)| (a - b).abs() < 1e-12));
        assert!((back.e_core - s.e_core).abs() < 1e-12);
    }
}

#[test]
fn hubbard_rotated_reference() {
    let s = build_hubbard(2, 1.0, 0.0, false).unwrap().to_core_eigenbasis();
    assert!((hf_energy(&s) - -2.0).abs() < 1e-12);
    let eps = civec::integrals::orbital_energies(&s);
    assert!((eps[0] + 1.0).abs() < 1e-12 && (eps[1] - 1.0).abs() < 1e-12);
}

fn random_op(n: usize, seeds: &[(u8, u8, f64, f64)]) -> QubitOperator {
    let mut out = QubitOperator::new(n).unwrap();
    for &(x, z, re, im) in seeds {
        let letters: Vec<(usize, Pauli)> = (0..n)
            .filter_map(|q| match (x >> q & 1, z >> q & 1) {
                (1, 0) => Some((q, Pauli::X)),
                (1, 1) => Some((q, Pauli::Y)),
                (0, 1) => Some((q, Pauli::Z)),
                _ => None,
            })
            .collect();
        let t = QubitOperator::single(n, &letters, Complex64::new(re, im)).unwrap();
        out = out.add(&t).unwrap();
    }
    out
}

proptest! {
    #[test]
    fn product_matches_dense(
        a in prop::collection::vec((0u8..8, 0u8..8, -1.0f64..1.0, -1.0f64..1.0), 1..6),
        b in prop::collection::vec((0u8..8, 0u8..8, -1.0f64..1.0, -1.0f64..1.0), 1..6),
    ) {
        let (oa, ob) = (random_op(3, &a), random_op(3, &b));
        let prod = oa.multiply(&ob).unwrap().to_dense_matrix().unwrap();
        let dense = oa.to_dense_matrix().unwrap() * ob.to_dense_matrix().unwrap();
        prop_assert!((prod - dense).norm() < 1e-10);
    }

    #[test]
    fn simplify_idempotent(a in prop::collection::vec((0u8..8, 0u8..8, -1.0f64..1.0, -1.0f64..1.0), 1..8)) {
        let op = random_op(3, &a);
        let s1 = op.simplify();
        prop_assert_eq!(s1.simplify(), s1.clone());
        prop_assert!((s1.to_dense_matrix().unwrap() - op.to_dense_matrix().unwrap()).norm() < 1e-12);
    }
}
