use nalgebra::DMatrix;
use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] =
    [17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0, 2162160.0, 110880.0, 3960.0, 90.0, 1.0];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
// Backward-error thresholds on the 1-norm for each Padé degree.
const THETA: [(usize, f64); 4] =
    [(3, 1.495585217958292e-2), (5, 2.53939833006323e-1), (7, 9.504178996162932e-1), (9, 2.097847961257068e0)];
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential by scaling and squaring with Padé approximants.
pub fn matexp(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::InvalidDimension(format!("matexp needs a square matrix, got {}x{}", a.rows(), a.cols())));
    }
    if !a.is_finite() {
        return Err(Error::NumericalRange("matexp input has non-finite entries".into()));
    }
    let n = a.dim();
    let ident = ComplexMatrix::identity(n);
    let norm = a.norm_one();
    if norm == 0.0 {
        return Ok(ident);
    }

    let a2 = a.matmul(a);
    for &(m, theta) in &THETA {
        if norm <= theta {
            let coeffs: &[f64] = match m {
                3 => &B3,
                5 => &B5,
                7 => &B7,
                _ => &B9,
            };
            let (u, v) = pade_low(a, &a2, &ident, coeffs);
            return finish(solve_pade(&u, &v)?);
        }
    }

    let s = ((norm / THETA13).log2().ceil().max(0.0)) as i32;
    let scale = 0.5f64.powi(s);
    let a1 = a.scale_real(scale);
    let a2 = a2.scale_real(scale * scale);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);
    let b = &B13;

    let mut inner_u = a6.scale_real(b[13]);
    inner_u.axpy(c(b[11]), &a4);
    inner_u.axpy(c(b[9]), &a2);
    let mut u = a6.matmul(&inner_u);
    u.axpy(c(b[7]), &a6);
    u.axpy(c(b[5]), &a4);
    u.axpy(c(b[3]), &a2);
    u.axpy(c(b[1]), &ident);
    let u = a1.matmul(&u);

    let mut inner_v = a6.scale_real(b[12]);
    inner_v.axpy(c(b[10]), &a4);
    inner_v.axpy(c(b[8]), &a2);
    let mut v = a6.matmul(&inner_v);
    v.axpy(c(b[6]), &a6);
    v.axpy(c(b[4]), &a4);
    v.axpy(c(b[2]), &a2);
    v.axpy(c(b[0]), &ident);

    let mut r = solve_pade(&u, &v)?;
    for _ in 0..s {
        r = r.matmul(&r);
    }
    finish(r)
}

#[inline]
fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn pade_low(a: &ComplexMatrix, a2: &ComplexMatrix, ident: &ComplexMatrix, b: &[f64]) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.dim();
    let mut u = ComplexMatrix::zeros(n, n);
    let mut v = ComplexMatrix::zeros(n, n);
    let mut pow = ident.clone();
    let mut k = 0;
    while 2 * k + 1 < b.len() {
        u.axpy(c(b[2 * k + 1]), &pow);
        v.axpy(c(b[2 * k]), &pow);
        k += 1;
        if 2 * k + 1 < b.len() {
            pow = pow.matmul(a2);
        }
    }
    (a.matmul(&u), v)
}

/// Solves (V − U) R = (V + U).
fn solve_pade(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = u.dim();
    let p = v + u;
    let q = v - u;
    let q_na = DMatrix::from_row_slice(n, n, q.as_slice());
    let p_na = DMatrix::from_row_slice(n, n, p.as_slice());
    let sol = q_na.lu().solve(&p_na).ok_or_else(|| Error::NumericalRange("singular Padé denominator".into()))?;
    Ok(ComplexMatrix::from_fn(n, n, |i, j| sol[(i, j)]))
}

fn finish(r: ComplexMatrix) -> Result<ComplexMatrix> {
    if !r.is_finite() {
        return Err(Error::NumericalRange("matexp overflowed".into()));
    }
    Ok(r)
}

/// exp(i·t·H) for Hermitian H, via the spectral decomposition.
pub fn expm_hermitian_i(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let eig = super::eigen::hermitian_eigen(h)?;
    let phases: Vec<Complex64> = eig.values.iter().map(|&e| Complex64::from_polar(1.0, t * e)).collect();
    Ok(eig.reconstruct_with(&phases))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fockcore::matrix::{is_unitary, I};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, scale: f64, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        let g = ComplexMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        (&g + &g.dagger()).scale_real(0.5 * scale)
    }

    // Taylor series summed to convergence, with the same scaling-and-squaring
    // wrapper, as an independent reference.
    fn taylor_expm(a: &ComplexMatrix) -> ComplexMatrix {
        let s = (a.norm_one().max(1.0).log2().ceil() as i32 + 4).max(0);
        let a1 = a.scale_real(0.5f64.powi(s));
        let n = a.dim();
        let mut term = ComplexMatrix::identity(n);
        let mut sum = term.clone();
        for k in 1..60 {
            term = term.matmul(&a1).scale_real(1.0 / k as f64);
            sum += &term;
        }
        for _ in 0..s {
            sum = sum.matmul(&sum);
        }
        sum
    }

    #[test]
    fn zero_gives_identity() {
        let z = ComplexMatrix::zeros(4, 4);
        assert_eq!(matexp(&z).unwrap(), ComplexMatrix::identity(4));
    }

    #[test]
    fn diagonal_phase() {
        let a = ComplexMatrix::from_diag(&[Complex64::new(0.0, 0.0), I * std::f64::consts::PI]);
        let e = matexp(&a).unwrap();
        assert!(e.approx_eq(&ComplexMatrix::from_real_diag(&[1.0, -1.0]), 1e-14));
    }

    #[test]
    fn inverse_pair_random_hermitian_dim16() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let h = random_hermitian(16, 0.5, &mut rng);
            let e = matexp(&h).unwrap();
            let einv = matexp(&h.scale_real(-1.0)).unwrap();
            let prod = e.matmul(&einv);
            let rel = prod.max_abs_diff(&ComplexMatrix::identity(16));
            assert!(rel < 1e-12, "{rel}");
        }
    }

    #[test]
    fn matches_taylor_across_norm_regimes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &scale in &[1e-3, 0.05, 0.3, 1.0, 3.0, 10.0] {
            let g =
                ComplexMatrix::from_fn(6, 6, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .scale_real(scale / 6.0);
            let e = matexp(&g).unwrap();
            let t = taylor_expm(&g);
            let rel = e.max_abs_diff(&t) / t.max_abs();
            assert!(rel < 1e-12, "scale {scale}: {rel}");
        }
    }

    #[test]
    fn skew_hermitian_is_unitary_large_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_hermitian(12, 40.0, &mut rng);
        let u = matexp(&h.scale(I)).unwrap();
        assert!(is_unitary(&u, 1e-11));
    }

    #[test]
    fn skew_hermitian_unitary_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for k in 0..100 {
            let n = 1 + k % 32;
            let h = random_hermitian(n, rng.gen_range(0.1..5.0), &mut rng);
            let u = matexp(&h.scale(I)).unwrap();
            assert!(is_unitary(&u, 1e-12), "dim {n}");
        }
    }

    #[test]
    fn spectral_route_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = random_hermitian(8, 1.0, &mut rng);
        let a = matexp(&h.scale(I * 0.7)).unwrap();
        let b = expm_hermitian_i(&h, 0.7).unwrap();
        assert!(a.approx_eq(&b, 1e-12));
    }

    #[test]
    fn non_finite_rejected() {
        let mut a = ComplexMatrix::zeros(2, 2);
        a[(0, 0)] = Complex64::new(f64::NAN, 0.0);
        assert!(matches!(matexp(&a), Err(Error::NumericalRange(_))));
        let big = ComplexMatrix::from_real_diag(&[1e6, 0.0]);
        assert!(matches!(matexp(&big), Err(Error::NumericalRange(_))));
    }
}
