use std::path::PathBuf;

use num_complex::Complex64;
use qumode_core::fermion::{
    build_molecular_hamiltonian, determinant_matrix, exact_ground_state, fock_space_matrix, group_pauli_sum,
    jordan_wigner, load_fcidump_file, pauli::ungroup, pauli_sum_to_matrix, MolecularIntegrals,
};
use qumode_core::fockcore::hermitian_eigen;

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn h2() -> MolecularIntegrals {
    load_fcidump_file(&data_dir().join("h2_0.7414.fcidump")).unwrap()
}

/// E_FCI from the reference table produced alongside the fixtures.
fn reference_fci(molecule: &str, r: f64) -> f64 {
    let text = std::fs::read_to_string(data_dir().join("fci_reference.csv")).unwrap();
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        if f[0] == molecule && (f[1].parse::<f64>().unwrap() - r).abs() < 1e-9 {
            return f[3].parse().unwrap();
        }
    }
    panic!("no reference for {molecule} {r}");
}

#[test]
fn fixture_shape() {
    let ints = h2();
    assert_eq!(ints.n_spatial, 2);
    assert_eq!(ints.n_electrons, Some(2));
    assert!(ints.two(0, 1, 1, 0).abs() > 0.1);
    assert!(ints.symmetry_error() < 1e-15);
}

#[test]
fn fermionic_hamiltonian_structure() {
    let h = build_molecular_hamiltonian(&h2());
    assert!(h.hermiticity_error() < 1e-14);
    // identity, 4 number terms, 6 density pairs, 2 exchange/double-excitation pairs with conjugates
    assert_eq!(h.len(), 15);
    assert_eq!(h.hermitian_group_count(), 13);
}

#[test]
fn qubit_hamiltonian_matches_coefficient_table() {
    let ints = h2();
    let o = |p, q| ints.spin_one(p, q);
    let t = |p, q, r, s| ints.spin_two(p, q, r, s);
    let q = jordan_wigner(&build_molecular_hamiltonian(&ints));
    assert!(q.max_imag() < 1e-14);
    assert_eq!(q.len(), 15);

    let g1 = ints.h_nuc
        + 0.5 * (o(0, 0) + o(1, 1) + o(2, 2) + o(3, 3))
        + 0.25
            * (t(0, 1, 1, 0)
                + t(2, 3, 3, 2)
                + t(0, 3, 3, 0)
                + t(1, 2, 2, 1)
                + (t(0, 2, 2, 0) - t(0, 2, 0, 2))
                + (t(1, 3, 3, 1) - t(1, 3, 1, 3)));
    let g2 = -0.5 * o(0, 0) - 0.25 * (t(0, 1, 1, 0) + t(0, 3, 3, 0) + (t(0, 2, 2, 0) - t(0, 2, 0, 2)));
    let g3 = -0.5 * o(2, 2) - 0.25 * (t(2, 3, 3, 2) + t(1, 2, 2, 1) + (t(0, 2, 2, 0) - t(0, 2, 0, 2)));
    let g4 = 0.25 * t(0, 1, 1, 0);
    let g5 = 0.25 * (t(0, 2, 2, 0) - t(0, 2, 0, 2));
    let g6 = 0.25 * t(0, 3, 3, 0);
    let g7 = 0.25 * t(2, 3, 3, 2);
    let g8 = 0.25 * t(0, 3, 1, 2);
    let expect = [
        ("IIII", g1),
        ("ZIII", g2),
        ("IZII", g2),
        ("IIZI", g3),
        ("IIIZ", g3),
        ("ZZII", g4),
        ("ZIZI", g5),
        ("IZIZ", g5),
        ("ZIIZ", g6),
        ("IZZI", g6),
        ("IIZZ", g7),
        ("XYYX", g8),
        ("YXXY", g8),
        ("XXYY", -g8),
        ("YYXX", -g8),
    ];
    for (w, g) in expect {
        let c = q.coefficient_of(w).unwrap();
        assert!((c - Complex64::new(g, 0.0)).norm() < 1e-12, "{w}: {c} vs {g}");
    }

    let groups = group_pauli_sum(&q).unwrap();
    assert_eq!(groups.len(), 8);
    let big = groups.iter().find(|g| g.members.len() == 4).unwrap();
    assert!((big.coeff.abs() - g8.abs()).abs() < 1e-12);
    let grouped = pauli_sum_to_matrix(&ungroup(&groups, 4), 4).unwrap();
    assert!(grouped.approx_eq(&pauli_sum_to_matrix(&q, 4).unwrap(), 1e-14));
}

#[test]
fn jw_matrix_equals_occupation_basis_matrix() {
    let h = build_molecular_hamiltonian(&h2());
    let via_pauli = pauli_sum_to_matrix(&jordan_wigner(&h), 4).unwrap();
    let direct = fock_space_matrix(&h).unwrap();
    assert!(via_pauli.approx_eq(&direct, 1e-12));
}

#[test]
fn sector_spectra_agree() {
    let h = build_molecular_hamiltonian(&h2());
    let full = pauli_sum_to_matrix(&jordan_wigner(&h), 4).unwrap();
    let mut sector_vals = Vec::new();
    for n in 0..=4 {
        let (_, m) = determinant_matrix(&h, n);
        sector_vals.extend(hermitian_eigen(&m).unwrap().values);
    }
    sector_vals.sort_by(f64::total_cmp);
    let full_vals = hermitian_eigen(&full).unwrap().values;
    for (a, b) in sector_vals.iter().zip(&full_vals) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn fci_energy_matches_reference_table() {
    let ints = h2();
    let (_, m) = determinant_matrix(&build_molecular_hamiltonian(&ints), 2);
    let (e, v) = exact_ground_state(&m).unwrap();
    assert!(v.is_normalized(1e-12));
    assert!((e - reference_fci("h2", 0.7414)).abs() < 1e-9, "{e}");
    assert!((e + 1.1373).abs() < 1e-4);
}

#[test]
fn h4_fci_matches_reference_table() {
    for r in [1.0, 2.0] {
        let ints = load_fcidump_file(&data_dir().join(format!("h4_{r:?}.fcidump"))).unwrap();
        let e = qumode_core::fermion::fci_energy(&ints, 4).unwrap();
        assert!((e - reference_fci("h4", r)).abs() < 1e-9, "{r}: {e}");
    }
}
