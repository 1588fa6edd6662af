//! Qubit-qumode gate matrices. Basis order is qubit ⊗ qumode, so a 2L-dim
//! operator is a 2×2 grid of L×L blocks indexed by the qubit state.

pub mod circuit;
pub mod kernel;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fockcore::{boson_annihilate, boson_create, kron, matexp, ComplexMatrix, I, ZERO};

pub use circuit::{compile_controlled_ecd, controlled_snap_circuit, Circuit, CircuitOp, Gate, Wire};
pub use kernel::{BeamSplitterKernel, DisplacementKernel};

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_row_major(2, 2, vec![ZERO, -I, I, ZERO]).expect("2x2")
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real_diag(&[1.0, -1.0])
}

pub fn hadamard() -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_real_rows(&[&[h, h], &[h, -h]])
}

/// |0⟩⟨0| and |1⟩⟨1|.
pub fn qubit_projector(bit: usize) -> ComplexMatrix {
    ComplexMatrix::ket_bra(2, bit, bit)
}

/// R(θ, φ) = exp[−i(θ/2)(cos φ X + sin φ Y)].
pub fn rotation(theta: f64, phi: f64) -> ComplexMatrix {
    let [r00, r01, r10, r11] = rotation_entries(theta, phi);
    ComplexMatrix::from_row_major(2, 2, vec![r00, r01, r10, r11]).expect("2x2")
}

/// Row-major entries of R(θ, φ).
#[inline]
pub fn rotation_entries(theta: f64, phi: f64) -> [Complex64; 4] {
    let (s, c) = (0.5 * theta).sin_cos();
    let c = Complex64::new(c, 0.0);
    [c, -I * s * Complex64::from_polar(1.0, -phi), -I * s * Complex64::from_polar(1.0, phi), c]
}

/// D(β) = exp(β b† − β* b) on L levels. The cutoff is taken as given.
pub fn displacement(beta: Complex64, l: usize) -> Result<ComplexMatrix> {
    let gen = &boson_create(l)?.scale(beta) - &boson_annihilate(l)?.scale(beta.conj());
    matexp(&gen)
}

fn block_diag2(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    &kron(&qubit_projector(0), a) + &kron(&qubit_projector(1), b)
}

/// CD(β) = |0⟩⟨0| ⊗ D(β) + |1⟩⟨1| ⊗ D(−β).
pub fn conditional_displacement(beta: Complex64, l: usize) -> Result<ComplexMatrix> {
    Ok(block_diag2(&displacement(beta, l)?, &displacement(-beta, l)?))
}

/// ECD(β) = |1⟩⟨0| ⊗ D(β/2) + |0⟩⟨1| ⊗ D(−β/2).
pub fn ecd(beta: Complex64, l: usize) -> Result<ComplexMatrix> {
    let dp = displacement(beta * 0.5, l)?;
    let dm = displacement(-beta * 0.5, l)?;
    Ok(&kron(&ComplexMatrix::ket_bra(2, 1, 0), &dp) + &kron(&ComplexMatrix::ket_bra(2, 0, 1), &dm))
}

/// U_ER(β, θ, φ) = ECD(β) · (R(θ, φ) ⊗ I).
pub fn ecd_rotation_block(beta: Complex64, theta: f64, phi: f64, l: usize) -> Result<ComplexMatrix> {
    Ok(ecd(beta, l)?.matmul(&kron(&rotation(theta, phi), &ComplexMatrix::identity(l))))
}

fn check_snap(theta: &[f64], l: usize) -> Result<()> {
    if theta.len() != l {
        return Err(Error::DimensionMismatch { expected: l, found: theta.len() });
    }
    Ok(())
}

/// S(θ) = diag(e^{iθ_0}, …, e^{iθ_{L−1}}).
pub fn snap(theta: &[f64], l: usize) -> Result<ComplexMatrix> {
    check_snap(theta, l)?;
    Ok(ComplexMatrix::from_diag(&theta.iter().map(|&t| Complex64::from_polar(1.0, t)).collect::<Vec<_>>()))
}

/// |0⟩⟨0| ⊗ S(θ) + |1⟩⟨1| ⊗ I.
pub fn snap_qubit_form(theta: &[f64], l: usize) -> Result<ComplexMatrix> {
    Ok(block_diag2(&snap(theta, l)?, &ComplexMatrix::identity(l)))
}

/// BS(β, φ) = exp[i(β/2)(e^{iφ} b₁†b₂ + e^{−iφ} b₁b₂†)] on L₁·L₂ levels.
pub fn beam_splitter(beta: f64, phi: f64, l1: usize, l2: usize) -> Result<ComplexMatrix> {
    let hop = kron(&boson_create(l1)?, &boson_annihilate(l2)?).scale(Complex64::from_polar(1.0, phi));
    let gen = (&hop + &hop.dagger()).scale(I * (0.5 * beta));
    matexp(&gen)
}

/// |0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ U.
pub fn controlled_embed(u: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !u.is_square() {
        return Err(Error::InvalidDimension("controlled unitary must be square".into()));
    }
    Ok(block_diag2(&ComplexMatrix::identity(u.dim()), u))
}

/// Two-qubit CNOT, first qubit controls. `on_zero` fires the flip when the
/// control is |0⟩ instead of |1⟩.
pub fn cnot(on_zero: bool) -> ComplexMatrix {
    let x = pauli_x();
    let id = ComplexMatrix::identity(2);
    if on_zero {
        block_diag2(&x, &id)
    } else {
        block_diag2(&id, &x)
    }
}

/// exp(i Z ⊗ A) with the Hermitian A of the CD exponent,
/// A(β) = −i(β b† − β* b).
pub fn cd_exponent_form(beta: Complex64, l: usize) -> Result<ComplexMatrix> {
    let a = (&boson_create(l)?.scale(beta) - &boson_annihilate(l)?.scale(beta.conj())).scale(-I);
    matexp(&kron(&pauli_z(), &a).scale(I))
}
