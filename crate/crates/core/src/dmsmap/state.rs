use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slater determinant given by its strictly increasing occupied spin orbitals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeterminantIndex {
    occupied: Vec<usize>,
    m: usize,
}

impl DeterminantIndex {
    pub fn new(occupied: Vec<usize>, m: usize) -> Result<Self> {
        if occupied.is_empty() {
            return Err(Error::InvalidArgument("determinant needs at least one electron".into()));
        }
        if occupied.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!("occupied orbitals {occupied:?} not strictly increasing")));
        }
        if occupied.last().is_some_and(|&p| p >= m) {
            return Err(Error::IndexOutOfRange(format!("orbital in {occupied:?} >= M={m}")));
        }
        Ok(Self { occupied, m })
    }

    pub fn occupied(&self) -> &[usize] {
        &self.occupied
    }

    pub fn n_electrons(&self) -> usize {
        self.occupied.len()
    }

    pub fn n_orbitals(&self) -> usize {
        self.m
    }
}

/// Occupation levels q_1..q_N of N bosonic modes; every level is at most M − N.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BosonFockIndex {
    levels: Vec<usize>,
    max_level: usize,
}

impl BosonFockIndex {
    pub fn new(levels: Vec<usize>, max_level: usize) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidArgument("need at least one mode".into()));
        }
        if let Some(&q) = levels.iter().find(|&&q| q > max_level) {
            return Err(Error::IndexOutOfRange(format!("level {q} exceeds {max_level}")));
        }
        Ok(Self { levels, max_level })
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn max_level(&self) -> usize {
        self.max_level
    }

    /// Basis index in the product space with `cutoff` levels per mode, mode 1 leftmost.
    pub fn flat_index(&self, cutoff: usize) -> usize {
        self.levels.iter().fold(0, |acc, &q| acc * cutoff + q)
    }
}

/// q_N = p_1 and q_j = p_{N−j+1} − p_{N−j} − 1 for j < N.
pub fn fermion_to_boson_state(d: &DeterminantIndex) -> BosonFockIndex {
    let p = &d.occupied;
    let n = p.len();
    let mut q = vec![0; n];
    for j in 1..n {
        q[j - 1] = p[n - j] - p[n - j - 1] - 1;
    }
    q[n - 1] = p[0];
    BosonFockIndex { levels: q, max_level: d.m - n }
}

/// Inverse map: p_1 = q_N and p_{k+1} = p_k + q_{N−k} + 1.
pub fn boson_to_fermion_state(b: &BosonFockIndex) -> Result<DeterminantIndex> {
    let q = &b.levels;
    let n = q.len();
    let mut p = Vec::with_capacity(n);
    p.push(q[n - 1]);
    for k in 1..n {
        let prev = p[k - 1];
        p.push(prev + q[n - 1 - k] + 1);
    }
    DeterminantIndex::new(p, b.max_level + n)
}
