use num_complex::Complex64;

use super::jw::ladder;
use super::pauli::PauliSum;
use crate::error::{Error, Result};

/// Particle number N̂ and total spin Ŝ² as Pauli sums on `m` qubits
/// (interleaved α/β spin orbitals).
pub fn symmetry_operators(m: usize) -> Result<(PauliSum, PauliSum)> {
    if m % 2 != 0 || m == 0 {
        return Err(Error::InvalidArgument(format!("spin-orbital count must be even and positive, got {m}")));
    }
    let number = |p: usize| ladder(m, p, true).mul(&ladder(m, p, false));
    let mut n_op = PauliSum::zero(m);
    let mut sz = PauliSum::zero(m);
    let mut s_plus = PauliSum::zero(m);
    for k in 0..m / 2 {
        let (a, b) = (2 * k, 2 * k + 1);
        n_op = n_op.add(&number(a)).add(&number(b));
        sz = sz.add(&number(a).scale(Complex64::new(0.5, 0.0))).add(&number(b).scale(Complex64::new(-0.5, 0.0)));
        s_plus = s_plus.add(&ladder(m, a, true).mul(&ladder(m, b, false)));
    }
    let s_minus = s_plus.adjoint();
    let s2 = s_minus.mul(&s_plus).add(&sz.mul(&sz.add(&PauliSum::identity(m, 1.0))));
    Ok((n_op, s2))
}
