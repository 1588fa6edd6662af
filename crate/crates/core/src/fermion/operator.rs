use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::integrals::MolecularIntegrals;
use crate::error::{Error, Result};
use crate::fockcore::ZERO;

/// Normal-ordered product `coeff · a†_{c0} a†_{c1} ... a_{a0} a_{a1} ...`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FermionTerm {
    pub coeff: Complex64,
    pub creators: Vec<usize>,
    pub annihilators: Vec<usize>,
}

impl FermionTerm {
    pub fn is_identity(&self) -> bool {
        self.creators.is_empty() && self.annihilators.is_empty()
    }

    /// Hermitian conjugate, still normal-ordered.
    pub fn adjoint(&self) -> Self {
        Self {
            coeff: self.coeff.conj(),
            creators: self.annihilators.iter().rev().copied().collect(),
            annihilators: self.creators.iter().rev().copied().collect(),
        }
    }
}

/// Sorts `idx` into the target order, returning the permutation sign, or
/// `None` when an index repeats (the product vanishes).
fn sort_with_sign(idx: &mut [usize], descending: bool) -> Option<f64> {
    let mut sign = 1.0;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 {
            let out_of_order = if descending { idx[j - 1] < idx[j] } else { idx[j - 1] > idx[j] };
            if idx[j - 1] == idx[j] {
                return None;
            }
            if !out_of_order {
                break;
            }
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(sign)
}

/// Sum of normal-ordered fermionic products over `n_modes` spin orbitals.
///
/// Canonical storage: creators ascending, annihilators descending, like terms
/// merged and coefficients below 1e-12 dropped.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FermionOperatorSum {
    n_modes: usize,
    terms: Vec<FermionTerm>,
}

impl FermionOperatorSum {
    pub fn new(n_modes: usize, raw: impl IntoIterator<Item = FermionTerm>) -> Result<Self> {
        let mut acc: BTreeMap<(Vec<usize>, Vec<usize>), Complex64> = BTreeMap::new();
        for mut t in raw {
            if let Some(&bad) = t.creators.iter().chain(&t.annihilators).find(|&&i| i >= n_modes) {
                return Err(Error::IndexOutOfRange(format!("mode {bad} >= {n_modes}")));
            }
            let (Some(s1), Some(s2)) =
                (sort_with_sign(&mut t.creators, false), sort_with_sign(&mut t.annihilators, true))
            else {
                continue;
            };
            *acc.entry((t.creators, t.annihilators)).or_insert(ZERO) += t.coeff * (s1 * s2);
        }
        let terms = acc
            .into_iter()
            .filter(|(_, c)| c.norm() > 1e-12)
            .map(|((creators, annihilators), coeff)| FermionTerm { coeff, creators, annihilators })
            .collect();
        Ok(Self { n_modes, terms })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn terms(&self) -> &[FermionTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.n_modes, self.terms.iter().map(FermionTerm::adjoint)).expect("indices already validated")
    }

    /// Largest coefficient difference between the sum and its adjoint.
    pub fn hermiticity_error(&self) -> f64 {
        let adj = self.adjoint();
        let mut err: f64 = 0.0;
        for t in &self.terms {
            let other = adj
                .terms
                .iter()
                .find(|u| u.creators == t.creators && u.annihilators == t.annihilators)
                .map_or(ZERO, |u| u.coeff);
            err = err.max((t.coeff - other).norm());
        }
        err.max(if adj.len() == self.len() { 0.0 } else { f64::INFINITY })
    }

    /// Number of terms when each Hermitian-conjugate pair counts once.
    pub fn hermitian_group_count(&self) -> usize {
        let mut count = 0;
        for (i, t) in self.terms.iter().enumerate() {
            let adj = t.adjoint();
            let mut key = (adj.creators.clone(), adj.annihilators.clone());
            // Normalize to canonical ordering for lookup.
            let s = FermionOperatorSum::new(self.n_modes, [adj]).expect("valid indices");
            if let Some(u) = s.terms.first() {
                key = (u.creators.clone(), u.annihilators.clone());
            }
            let partner = self.terms.iter().position(|u| (u.creators.clone(), u.annihilators.clone()) == key);
            if partner.is_none_or(|j| j >= i) {
                count += 1;
            }
        }
        count
    }
}

/// Spin-orbital electronic Hamiltonian
/// `h_nuc + Σ h_pq a†p a_q + ½ Σ h_pqrs a†p a†q a_r a_s`, orbitals interleaved
/// as (φ0 α, φ0 β, φ1 α, ...).
pub fn build_molecular_hamiltonian(ints: &MolecularIntegrals) -> FermionOperatorSum {
    let m = ints.n_spin_orbitals();
    let mut raw = vec![FermionTerm { coeff: Complex64::new(ints.h_nuc, 0.0), creators: vec![], annihilators: vec![] }];
    for p in 0..m {
        for q in 0..m {
            let h = ints.spin_one(p, q);
            if h != 0.0 {
                raw.push(FermionTerm { coeff: Complex64::new(h, 0.0), creators: vec![p], annihilators: vec![q] });
            }
        }
    }
    for p in 0..m {
        for q in 0..m {
            for r in 0..m {
                for s in 0..m {
                    let h = ints.spin_two(p, q, r, s);
                    if h != 0.0 {
                        raw.push(FermionTerm {
                            coeff: Complex64::new(0.5 * h, 0.0),
                            creators: vec![p, q],
                            annihilators: vec![r, s],
                        });
                    }
                }
            }
        }
    }
    FermionOperatorSum::new(m, raw).expect("indices bounded by construction")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_integrals_give_identity() {
        let ints = MolecularIntegrals::zeros(2, 1.0);
        let h = build_molecular_hamiltonian(&ints);
        assert_eq!(h.len(), 1);
        assert!(h.terms()[0].is_identity());
        assert_eq!(h.terms()[0].coeff, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn canonical_sign() {
        let s = FermionOperatorSum::new(
            4,
            [FermionTerm { coeff: Complex64::new(1.0, 0.0), creators: vec![1, 0], annihilators: vec![0, 1] }],
        )
        .unwrap();
        // a†1 a†0 a0 a1 = a†0 a†1 a1 a0
        assert_eq!(s.terms()[0].creators, vec![0, 1]);
        assert_eq!(s.terms()[0].annihilators, vec![1, 0]);
        assert_eq!(s.terms()[0].coeff, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn repeated_index_vanishes() {
        let s = FermionOperatorSum::new(
            2,
            [FermionTerm { coeff: Complex64::new(1.0, 0.0), creators: vec![1, 1], annihilators: vec![] }],
        )
        .unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn out_of_range_rejected() {
        let r = FermionOperatorSum::new(
            2,
            [FermionTerm { coeff: Complex64::new(1.0, 0.0), creators: vec![2], annihilators: vec![] }],
        );
        assert!(r.is_err());
    }
}
