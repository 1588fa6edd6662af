use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fockcore::{ComplexMatrix, ONE, ZERO};

/// Densest qubit count `pauli_sum_to_matrix` will expand.
pub const MAX_DENSE_QUBITS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    /// Single-qubit product `self · other = i^k · result`.
    fn mul(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (a, b) if a == b => (0, I),
            (X, Y) => (1, Z),
            (Y, Z) => (1, X),
            (Z, X) => (1, Y),
            (Y, X) => (3, Z),
            (Z, Y) => (3, X),
            (X, Z) => (3, Y),
            _ => unreachable!(),
        }
    }
}

/// Tensor product of single-qubit Paulis with a phase `i^phase`.
///
/// Letters are stored as x/z bit masks; bit p belongs to qubit p, and qubit 0
/// is the leftmost letter and the most significant bit of a basis index.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PauliWord {
    n_qubits: usize,
    x: u64,
    z: u64,
    phase: u8,
}

impl PauliWord {
    pub fn identity(n_qubits: usize) -> Self {
        assert!(n_qubits <= 64, "at most 64 qubits");
        Self { n_qubits, x: 0, z: 0, phase: 0 }
    }

    pub fn single(n_qubits: usize, qubit: usize, p: Pauli) -> Self {
        let mut w = Self::identity(n_qubits);
        w.set(qubit, p);
        w
    }

    pub fn from_letters(letters: &[Pauli]) -> Self {
        let mut w = Self::identity(letters.len());
        for (q, &p) in letters.iter().enumerate() {
            w.set(q, p);
        }
        w
    }

    fn set(&mut self, qubit: usize, p: Pauli) {
        assert!(qubit < self.n_qubits, "qubit {qubit} out of range");
        let bit = 1u64 << qubit;
        self.x &= !bit;
        self.z &= !bit;
        if matches!(p, Pauli::X | Pauli::Y) {
            self.x |= bit;
        }
        if matches!(p, Pauli::Z | Pauli::Y) {
            self.z |= bit;
        }
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn letter(&self, qubit: usize) -> Pauli {
        Pauli::from_bits(self.x >> qubit & 1 == 1, self.z >> qubit & 1 == 1)
    }

    pub fn letters(&self) -> Vec<Pauli> {
        (0..self.n_qubits).map(|q| self.letter(q)).collect()
    }

    /// Phase as a unit complex number in {1, i, -1, -i}.
    pub fn phase(&self) -> Complex64 {
        i_pow(self.phase)
    }

    /// Same letters with phase reset to +1.
    pub fn without_phase(&self) -> Self {
        Self { phase: 0, ..*self }
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n_qubits, other.n_qubits, "qubit count mismatch");
        let mut out = Self::identity(self.n_qubits);
        let mut phase = self.phase + other.phase;
        for q in 0..self.n_qubits {
            let (k, p) = self.letter(q).mul(other.letter(q));
            phase += k;
            out.set(q, p);
        }
        out.phase = phase % 4;
        out
    }

    /// Sub-word on the contiguous qubit range `start..start+len`.
    pub fn slice(&self, start: usize, len: usize) -> Self {
        let letters = self.letters();
        Self::from_letters(&letters[start..start + len])
    }

    pub fn label(&self) -> String {
        self.letters().iter().map(|p| p.symbol()).collect()
    }

    /// Dense 2^n matrix including the phase.
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let mut m = dense_zero(self.n_qubits)?;
        add_word_into(&mut m, self, ONE);
        Ok(m)
    }
}

fn i_pow(k: u8) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl fmt::Debug for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ph = ["", "i", "-", "-i"][self.phase as usize];
        write!(f, "{ph}{}", self.label())
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for PauliWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() || s.len() > 64 {
            return Err(Error::InvalidArgument(format!("Pauli word '{s}' must have 1..=64 letters")));
        }
        let letters = s
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::InvalidArgument(format!("invalid Pauli letter '{other}' in '{s}'"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_letters(&letters))
    }
}

fn dense_zero(n_qubits: usize) -> Result<ComplexMatrix> {
    if n_qubits > MAX_DENSE_QUBITS {
        return Err(Error::InvalidDimension(format!(
            "{n_qubits} qubits exceeds the dense limit of {MAX_DENSE_QUBITS}"
        )));
    }
    let d = 1usize << n_qubits;
    Ok(ComplexMatrix::zeros(d, d))
}

/// Converts a qubit-indexed mask to a basis-index mask (qubit 0 is the MSB).
fn basis_mask(mask: u64, n: usize) -> usize {
    let mut out = 0usize;
    for q in 0..n {
        if mask >> q & 1 == 1 {
            out |= 1 << (n - 1 - q);
        }
    }
    out
}

fn add_word_into(m: &mut ComplexMatrix, w: &PauliWord, coeff: Complex64) {
    let n = w.n_qubits;
    let xm = basis_mask(w.x, n);
    let zm = basis_mask(w.z, n);
    let ny = (w.x & w.z).count_ones() as u8;
    // Y = i X Z, so a word acts as i^{#Y} X^x Z^z with Z applied first.
    let base = coeff * i_pow(w.phase + ny);
    for col in 0..(1usize << n) {
        let row = col ^ xm;
        let sign = if (col & zm).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        m[(row, col)] += base * sign;
    }
}

/// A term `coeff · word`, with the word's phase folded into the coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub coeff: Complex64,
    pub word: PauliWord,
}

/// Linear combination of phase-free Pauli words, canonically sorted and merged.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
}

/// Coefficients below this magnitude are dropped during canonicalization.
pub const DROP_TOL: f64 = 1e-12;

impl PauliSum {
    pub fn zero(n_qubits: usize) -> Self {
        Self { n_qubits, terms: Vec::new() }
    }

    pub fn identity(n_qubits: usize, coeff: f64) -> Self {
        Self::from_terms(n_qubits, [(Complex64::new(coeff, 0.0), PauliWord::identity(n_qubits))])
    }

    /// Builds a canonical sum: phases folded in, duplicates merged, tiny terms dropped.
    pub fn from_terms(n_qubits: usize, terms: impl IntoIterator<Item = (Complex64, PauliWord)>) -> Self {
        let mut acc: BTreeMap<PauliWord, Complex64> = BTreeMap::new();
        for (c, w) in terms {
            assert_eq!(w.n_qubits, n_qubits, "qubit count mismatch");
            *acc.entry(w.without_phase()).or_insert(ZERO) += c * w.phase();
        }
        let terms = acc
            .into_iter()
            .filter(|(_, c)| c.norm() > DROP_TOL)
            .map(|(word, coeff)| PauliTerm { coeff, word })
            .collect();
        Self { n_qubits, terms }
    }

    pub fn from_real(n_qubits: usize, terms: &[(f64, &str)]) -> Result<Self> {
        let parsed = terms
            .iter()
            .map(|&(c, s)| Ok((Complex64::new(c, 0.0), s.parse::<PauliWord>()?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_terms(n_qubits, parsed))
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, word: &PauliWord) -> Complex64 {
        let key = word.without_phase();
        self.terms.iter().find(|t| t.word == key).map_or(ZERO, |t| t.coeff * word.phase().conj())
    }

    pub fn coefficient_of(&self, label: &str) -> Result<Complex64> {
        Ok(self.coefficient(&label.parse()?))
    }

    pub fn add(&self, other: &Self) -> Self {
        let all = self.terms.iter().chain(&other.terms).map(|t| (t.coeff, t.word));
        Self::from_terms(self.n_qubits, all)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_terms(self.n_qubits, self.terms.iter().map(|t| (t.coeff * s, t.word)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut prods = Vec::with_capacity(self.len() * other.len());
        for a in &self.terms {
            for b in &other.terms {
                prods.push((a.coeff * b.coeff, a.word.mul(&b.word)));
            }
        }
        Self::from_terms(self.n_qubits, prods)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_terms(self.n_qubits, self.terms.iter().map(|t| (t.coeff.conj(), t.word)))
    }

    pub fn max_imag(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.im.abs()).fold(0.0, f64::max)
    }

    /// Real coefficients, failing if any imaginary part exceeds `tol`.
    pub fn real_terms(&self, tol: f64) -> Result<Vec<(f64, PauliWord)>> {
        let im = self.max_imag();
        if im > tol {
            return Err(Error::NotHermitian(im));
        }
        Ok(self.terms.iter().map(|t| (t.coeff.re, t.word)).collect())
    }

    /// Identity coefficient.
    pub fn constant(&self) -> Complex64 {
        self.coefficient(&PauliWord::identity(self.n_qubits))
    }
}

/// Σ g_μ ⊗σ as a dense 2^n × 2^n matrix.
pub fn pauli_sum_to_matrix(sum: &PauliSum, n_qubits: usize) -> Result<ComplexMatrix> {
    if sum.n_qubits != n_qubits {
        return Err(Error::DimensionMismatch { expected: n_qubits, found: sum.n_qubits });
    }
    let mut m = dense_zero(n_qubits)?;
    for t in &sum.terms {
        add_word_into(&mut m, &t.word, t.coeff);
    }
    Ok(m)
}

/// Words sharing one coefficient magnitude: O = Σ sign_k · word_k.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliGroup {
    pub coeff: f64,
    pub members: Vec<(f64, PauliWord)>,
}

impl PauliGroup {
    /// The grouped operator O (without the coefficient).
    pub fn operator(&self) -> PauliSum {
        let n = self.members[0].1.n_qubits();
        PauliSum::from_terms(n, self.members.iter().map(|&(s, w)| (Complex64::new(s, 0.0), w)))
    }

    pub fn contains_identity(&self) -> bool {
        self.members.iter().any(|(_, w)| w.is_identity())
    }
}

/// Tolerance for treating two coefficients as equal when grouping.
pub const GROUP_TOL: f64 = 1e-12;

/// Groups words whose coefficients agree in magnitude within [`GROUP_TOL`].
///
/// The identity word always forms its own group. Groups are ordered by their
/// first member in the sum's canonical order and each group's coefficient is
/// taken from that first member.
pub fn group_pauli_sum(sum: &PauliSum) -> Result<Vec<PauliGroup>> {
    let real = sum.real_terms(1e-10)?;
    let mut groups: Vec<PauliGroup> = Vec::new();
    let mut identity: Option<PauliGroup> = None;
    for (c, w) in real {
        if w.is_identity() {
            identity = Some(PauliGroup { coeff: c, members: vec![(1.0, w)] });
            continue;
        }
        match groups.iter_mut().find(|g| (g.coeff.abs() - c.abs()).abs() <= GROUP_TOL) {
            Some(g) => g.members.push((if c * g.coeff >= 0.0 { 1.0 } else { -1.0 }, w)),
            None => groups.push(PauliGroup { coeff: c, members: vec![(1.0, w)] }),
        }
    }
    if let Some(id) = identity {
        groups.insert(0, id);
    }
    Ok(groups)
}

/// Recombines groups into a flat sum.
pub fn ungroup(groups: &[PauliGroup], n_qubits: usize) -> PauliSum {
    PauliSum::from_terms(
        n_qubits,
        groups.iter().flat_map(|g| g.members.iter().map(move |&(s, w)| (Complex64::new(g.coeff * s, 0.0), w))),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn single_qubit_algebra() {
        let x: PauliWord = "X".parse().unwrap();
        let y: PauliWord = "Y".parse().unwrap();
        let z: PauliWord = "Z".parse().unwrap();
        let xy = x.mul(&y);
        assert_eq!(xy.label(), "Z");
        assert_eq!(xy.phase(), Complex64::new(0.0, 1.0));
        assert!(x.mul(&x).is_identity());
        let zx = z.mul(&x);
        assert_eq!((zx.label(), zx.phase()), ("Y".into(), Complex64::new(0.0, 1.0)));
    }

    #[test]
    fn matrices_of_letters() {
        let y = "Y".parse::<PauliWord>().unwrap().to_matrix().unwrap();
        assert_eq!(y[(0, 1)], Complex64::new(0.0, -1.0));
        assert_eq!(y[(1, 0)], Complex64::new(0.0, 1.0));
        let z = "Z".parse::<PauliWord>().unwrap().to_matrix().unwrap();
        assert_eq!(z, ComplexMatrix::from_real_diag(&[1.0, -1.0]));
    }

    #[test]
    fn z0_plus_z1() {
        let s = PauliSum::from_real(2, &[(1.0, "ZI"), (1.0, "IZ")]).unwrap();
        let m = pauli_sum_to_matrix(&s, 2).unwrap();
        assert_eq!(m, ComplexMatrix::from_real_diag(&[2.0, 0.0, 0.0, -2.0]));
    }

    #[test]
    fn qubit_zero_is_leftmost_factor() {
        let xi = "XI".parse::<PauliWord>().unwrap().to_matrix().unwrap();
        let x = "X".parse::<PauliWord>().unwrap().to_matrix().unwrap();
        let expect = crate::fockcore::kron(&x, &ComplexMatrix::identity(2));
        assert_eq!(xi, expect);
    }

    #[test]
    fn word_matrix_product_matches_algebra() {
        let words = ["XYZI", "YYXZ", "ZIXY", "IXYZ"];
        for a in words {
            for b in words {
                let wa: PauliWord = a.parse().unwrap();
                let wb: PauliWord = b.parse().unwrap();
                let direct = wa.to_matrix().unwrap().matmul(&wb.to_matrix().unwrap());
                assert!(direct.approx_eq(&wa.mul(&wb).to_matrix().unwrap(), 1e-15));
            }
        }
    }

    #[test]
    fn merging_duplicates() {
        let s = PauliSum::from_real(1, &[(0.5, "Z"), (0.25, "Z")]).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.terms()[0].coeff, c(0.75));
    }

    #[test]
    fn grouping_distinct_is_identity() {
        let s = PauliSum::from_real(2, &[(0.1, "ZI"), (0.2, "IZ"), (0.3, "XX")]).unwrap();
        let g = group_pauli_sum(&s).unwrap();
        assert_eq!(g.len(), 3);
        assert!(g.iter().all(|g| g.members.len() == 1));
        assert_eq!(ungroup(&g, 2), s);
    }

    #[test]
    fn dense_limit() {
        let s = PauliSum::identity(13, 1.0);
        assert!(pauli_sum_to_matrix(&s, 13).is_err());
    }

    #[test]
    fn parse_rejects_bad_letters() {
        assert!("ZQ".parse::<PauliWord>().is_err());
        assert!("".parse::<PauliWord>().is_err());
    }
}
