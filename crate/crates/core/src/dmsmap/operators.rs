use crate::error::{Error, Result};
use crate::fockcore::{kron, ComplexMatrix, ONE};

/// Normalized raising operator b̄†|n⟩ = |n+1⟩ on `l` levels.
pub fn normalized_raise(l: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(l, l);
    for n in 0..l.saturating_sub(1) {
        m[(n + 1, n)] = ONE;
    }
    m
}

/// One-electron image of ℰ_pq = a†_p a_q on an `l`-level mode.
///
/// ℰ_pp ↦ |p⟩⟨p| and ℰ_{q+k,q} ↦ (b̄†)^k |q⟩⟨q|; lowering operators are the
/// adjoints of the raising ones.
pub fn map_bilinear_n1(p: usize, q: usize, l: usize) -> Result<ComplexMatrix> {
    if p >= l || q >= l {
        return Err(Error::IndexOutOfRange(format!("orbital index ({p},{q}) >= cutoff {l}")));
    }
    if p < q {
        return Ok(map_bilinear_n1(q, p, l)?.dagger());
    }
    let proj = ComplexMatrix::ket_bra(l, q, q);
    Ok(normalized_raise(l).powi((p - q) as u32).matmul(&proj))
}

fn add_ket_bra(m: &mut ComplexMatrix, l: usize, ket: (usize, usize), bra: (usize, usize), c: f64) {
    if ket.0 < l && ket.1 < l && bra.0 < l && bra.1 < l {
        m[(ket.0 * l + ket.1, bra.0 * l + bra.1)] += ONE * c;
    }
}

/// Two-electron image of ℰ_pq = a†_p a_q on two modes with `l` levels each.
///
/// Projector form: for the raising case ℰ_{q+k,q},
/// Σ_{j+i=q−1} |j+k, i⟩⟨j, i| + Σ_j |j, q+k⟩⟨j+k, q| − Σ_{j=0}^{k−2} |k−2−j, q+j+1⟩⟨j, q|,
/// and for the number case ℰ_pp ↦ I⊗|p⟩⟨p| + Σ_{j+i=p−1} |j, i⟩⟨j, i|. Terms
/// that would leave the truncated space are dropped.
pub fn map_bilinear_n2(p: usize, q: usize, l: usize) -> Result<ComplexMatrix> {
    if l == 0 {
        return Err(Error::InvalidDimension("cutoff must be positive".into()));
    }
    // The highest orbital reachable with two electrons on l levels is l.
    if p > l || q > l {
        return Err(Error::IndexOutOfRange(format!("orbital index ({p},{q}) > {l}")));
    }
    if p < q {
        return Ok(map_bilinear_n2(q, p, l)?.dagger());
    }
    let d = l * l;
    let mut m = ComplexMatrix::zeros(d, d);
    if p == q {
        for j in 0..l {
            add_ket_bra(&mut m, l, (j, p), (j, p), 1.0);
        }
        if p >= 1 {
            for j in 0..p {
                let k = p - 1 - j;
                add_ket_bra(&mut m, l, (j, k), (j, k), 1.0);
            }
        }
        return Ok(m);
    }
    let k = p - q;
    if q >= 1 {
        for j in 0..q {
            let i = q - 1 - j;
            add_ket_bra(&mut m, l, (j + k, i), (j, i), 1.0);
        }
    }
    for j in 0..l {
        add_ket_bra(&mut m, l, (j, q + k), (j + k, q), 1.0);
    }
    if k >= 2 {
        for j in 0..=(k - 2) {
            add_ket_bra(&mut m, l, (k - 2 - j, q + j + 1), (j, q), -1.0);
        }
    }
    Ok(m)
}

/// Standard truncated annihilation operator for mode `mode` (0 or 1) of a
/// two-mode space with `l` levels per mode.
pub fn two_mode_annihilate(mode: usize, l: usize) -> Result<ComplexMatrix> {
    let a = crate::fockcore::boson_annihilate(l)?;
    let id = ComplexMatrix::identity(l);
    Ok(if mode == 0 { kron(&a, &id) } else { kron(&id, &a) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n1_examples() {
        assert_eq!(map_bilinear_n1(0, 0, 3).unwrap(), ComplexMatrix::from_real_diag(&[1.0, 0.0, 0.0]));
        assert_eq!(map_bilinear_n1(1, 0, 3).unwrap(), ComplexMatrix::ket_bra(3, 1, 0));
        for p in 0..4 {
            for q in 0..4 {
                assert_eq!(map_bilinear_n1(p, q, 4).unwrap(), map_bilinear_n1(q, p, 4).unwrap().dagger());
            }
        }
        assert!(map_bilinear_n1(3, 0, 3).is_err());
    }

    #[test]
    fn n2_number_examples() {
        let l = 3;
        let e00 = map_bilinear_n2(0, 0, l).unwrap();
        assert_eq!(e00, kron(&ComplexMatrix::identity(l), &ComplexMatrix::ket_bra(l, 0, 0)));
        let e11 = map_bilinear_n2(1, 1, l).unwrap();
        let mut expect = kron(&ComplexMatrix::identity(l), &ComplexMatrix::ket_bra(l, 1, 1));
        expect[(0, 0)] += ONE;
        assert_eq!(e11, expect);
    }

    #[test]
    fn n2_transfer_examples() {
        let l = 3;
        let e10 = map_bilinear_n2(1, 0, l).unwrap();
        let mut expect = ComplexMatrix::zeros(9, 9);
        for j in 1..l {
            expect[((j - 1) * l + 1, j * l)] = ONE;
        }
        assert_eq!(e10, expect);

        let e20 = map_bilinear_n2(2, 0, l).unwrap();
        let mut expect = ComplexMatrix::zeros(9, 9);
        for j in 1..l - 1 {
            expect[((j - 1) * l + 2, (j + 1) * l)] = ONE;
        }
        expect[(1, 0)] = -ONE;
        assert_eq!(e20, expect);
    }
}
