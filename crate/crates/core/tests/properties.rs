use num_complex::Complex64;
use proptest::prelude::*;
use qumode_core::compiler::{
    lcu_matrix, loss_ecd, loss_snap, snap_chain_unitary, zero_block, EcdChain, LcuDecomposition, ParamLibrary,
    SnapChain,
};
use qumode_core::compiler::{CompileHyper, CompileMethod, CompileResult, Decomposition};
use qumode_core::fermion::pauli::ungroup;
use qumode_core::fermion::{group_pauli_sum, pauli_sum_to_matrix, qubit_hamiltonian, MolecularIntegrals};
use qumode_core::fockcore::{
    boson_annihilate, boson_create, is_unitary, kron, matexp, number_operator, ComplexMatrix, StateVector, I,
};
use qumode_core::gates::{beam_splitter, displacement, ecd, rotation, snap};
use qumode_core::vqe::{direct_expectation, hadamard_expectation, prepare_trial_state, ExpectationMode, TrialAnsatz};

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(complex(), rows * cols)
        .prop_map(move |v| ComplexMatrix::from_fn(rows, cols, |i, j| v[i * cols + j]))
}

fn square(max: usize) -> impl Strategy<Value = ComplexMatrix> {
    (1..=max).prop_flat_map(|n| matrix(n, n))
}

fn state(n: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec(complex(), n)
        .prop_filter("nonzero", |v| v.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-6)
        .prop_map(|v| StateVector::new(v).unwrap().normalized().unwrap())
}

fn angles(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-std::f64::consts::PI..std::f64::consts::PI, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn ladder_operators_are_adjoint(l in 1usize..24) {
        let a = boson_annihilate(l).unwrap();
        prop_assert!(boson_create(l).unwrap().approx_eq(&a.dagger(), 0.0));
        let n = number_operator(l).unwrap();
        for i in 0..l {
            for j in 0..l {
                let expect = if i == j { i as f64 } else { 0.0 };
                prop_assert_eq!(n[(i, j)], Complex64::new(expect, 0.0));
            }
        }
    }

    #[test]
    fn matexp_of_skew_hermitian_is_unitary(h in square(32)) {
        let u = matexp(&h.hermitian_part().scale(I)).unwrap();
        prop_assert!(is_unitary(&u, 1e-12));
    }

    #[test]
    fn kron_mixed_product(
        (a, c) in (1usize..4, 1usize..4, 1usize..4).prop_flat_map(|(m, k, n)| (matrix(m, k), matrix(k, n))),
        (b, d) in (1usize..4, 1usize..4, 1usize..4).prop_flat_map(|(m, k, n)| (matrix(m, k), matrix(k, n))),
    ) {
        let lhs = kron(&a, &b).matmul(&kron(&c, &d));
        let rhs = kron(&a.matmul(&c), &b.matmul(&d));
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
    }

    #[test]
    fn kron_associative(a in square(3), b in square(3), c in square(3)) {
        let lhs = kron(&kron(&a, &b), &c);
        let rhs = kron(&a, &kron(&b, &c));
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
    }

    #[test]
    fn gates_are_unitary(beta in complex(), theta in angles(10), phi in -3.2..3.2f64, bs in -3.2..3.2f64) {
        let l = (8.0 * beta.norm_sqr() + 16.0).ceil() as usize;
        prop_assert!(is_unitary(&displacement(beta, l).unwrap(), 1e-10));
        prop_assert!(is_unitary(&ecd(beta, l).unwrap(), 1e-10));
        prop_assert!(is_unitary(&snap(&theta, 10).unwrap(), 1e-10));
        prop_assert!(is_unitary(&rotation(theta[0], phi), 1e-10));
        prop_assert!(is_unitary(&beam_splitter(bs, phi, 4, 3).unwrap(), 1e-10));
    }

    #[test]
    fn hadamard_exact_equals_direct(
        (s, h) in (1usize..=64).prop_flat_map(|n| (state(n), matrix(n, n)))
    ) {
        let u = matexp(&h.hermitian_part().scale(I)).unwrap();
        let e = hadamard_expectation(&s, &u, ExpectationMode::Exact).unwrap();
        prop_assert!((e - direct_expectation(&s, &u)).abs() <= 1e-12);
    }
}

fn snap_chain(depth: usize, l: usize) -> impl Strategy<Value = SnapChain> {
    (prop::collection::vec(-1.0..1.0f64, depth), prop::collection::vec(angles(l), depth))
        .prop_map(move |(alpha, theta)| SnapChain { alpha, theta, cutoff: l })
}

fn lcu(n_terms: usize, depth: usize, l: usize) -> impl Strategy<Value = LcuDecomposition> {
    let chain = (prop::collection::vec(complex(), depth), angles(depth), angles(depth))
        .prop_map(move |(beta, theta, phi)| EcdChain { beta, theta, phi, cutoff: l });
    (prop::collection::vec(-1.0..1.0f64, n_terms), prop::collection::vec(chain, n_terms))
        .prop_map(|(lambda, chains)| LcuDecomposition { lambda, chains })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn snap_loss_nonnegative_and_zero_on_own_unitary(chain in snap_chain(3, 4), t in matrix(4, 4)) {
        prop_assert!(loss_snap(&chain, &t).unwrap() >= 0.0);
        let own = snap_chain_unitary(&chain).unwrap();
        prop_assert!(loss_snap(&chain, &own).unwrap() <= 1e-28);
    }

    #[test]
    fn ecd_loss_nonnegative_and_zero_on_own_block(d in lcu(2, 2, 4), t in matrix(4, 4)) {
        prop_assert!(loss_ecd(&d, &t).unwrap() >= 0.0);
        let own = zero_block(&lcu_matrix(&d).unwrap());
        prop_assert!(loss_ecd(&d, &own).unwrap() <= 1e-28);
    }

    #[test]
    fn hermitian_target_bounds_block_asymmetry(d in lcu(3, 2, 4), w in matrix(4, 4)) {
        let w = w.hermitian_part();
        let v0 = zero_block(&lcu_matrix(&d).unwrap());
        let f = loss_ecd(&d, &w).unwrap();
        let asym = (&v0 - &v0.dagger()).frobenius_norm();
        prop_assert!(asym <= 2.0 * (16.0 * f).sqrt() + 1e-12);
    }

    #[test]
    fn flat_roundtrips(chain in snap_chain(3, 4), d in lcu(2, 3, 4)) {
        let back = SnapChain::from_flat(&chain.to_flat(), 3, 4).unwrap();
        prop_assert_eq!(back, chain);
        let back = LcuDecomposition::from_flat(&d.to_flat(), 2, 3, 4).unwrap();
        prop_assert_eq!(back, d);
    }

    #[test]
    fn library_json_roundtrip_is_exact(chain in snap_chain(2, 4)) {
        let hyper = CompileHyper { depth: 2, ..Default::default() };
        let target = snap_chain_unitary(&chain).unwrap();
        let mut lib = ParamLibrary::new(CompileMethod::Snap, &hyper);
        let result = CompileResult {
            final_loss: loss_snap(&chain, &target).unwrap(),
            decomposition: Decomposition::Snap(chain),
            iterations: 1,
            restarts_used: 1,
            seed: 0,
            warning: false,
        };
        lib.insert("XY", result);
        let text = lib.to_json().unwrap();
        let back = ParamLibrary::from_json(&text).unwrap();
        prop_assert_eq!(back.to_json().unwrap(), text);
    }

    #[test]
    fn trial_states_are_normalized(seed in any::<u64>(), kind in 0usize..5) {
        use rand::SeedableRng;
        let ansatz = match kind {
            0 => TrialAnsatz::ecd_rot(3, 8),
            1 => TrialAnsatz::snap_disp(2, 8),
            2 => TrialAnsatz::multimode(2, &[4, 3]),
            3 => TrialAnsatz::dms_ecd(2),
            _ => TrialAnsatz::dms_qutrit(),
        };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let p = ansatz.initial_params(&mut rng);
        let s = prepare_trial_state(&ansatz, &p).unwrap();
        prop_assert!((s.norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn jw_hamiltonian_is_real_and_grouping_preserves_matrix(
        h in prop::collection::vec(-1.0..1.0f64, 3),
        v in prop::collection::vec(-0.5..0.5f64, 6),
        nuc in 0.0..1.0f64,
    ) {
        let mut ints = MolecularIntegrals::zeros(2, nuc);
        ints.set_one(0, 0, h[0]);
        ints.set_one(1, 1, h[1]);
        ints.set_one(0, 1, h[2]);
        ints.set_chem(0, 0, 0, 0, v[0]);
        ints.set_chem(1, 1, 1, 1, v[1]);
        ints.set_chem(0, 0, 1, 1, v[2]);
        ints.set_chem(0, 1, 0, 1, v[3]);
        ints.set_chem(0, 0, 0, 1, v[4]);
        ints.set_chem(1, 1, 0, 1, v[5]);
        let q = qubit_hamiltonian(&ints);
        prop_assert!(q.max_imag() < 1e-14);
        let groups = group_pauli_sum(&q).unwrap();
        let regrouped = pauli_sum_to_matrix(&ungroup(&groups, 4), 4).unwrap();
        prop_assert!(regrouped.max_abs_diff(&pauli_sum_to_matrix(&q, 4).unwrap()) <= 1e-12);
    }
}
