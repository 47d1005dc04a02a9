use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Strictly increasing set of qubit indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QubitSet(Vec<usize>);

impl QubitSet {
    /// Validates `indices` against a register of `num_qubits` qubits. Input
    /// order is irrelevant; duplicates and out-of-range indices are rejected.
    pub fn new(indices: impl IntoIterator<Item = usize>, num_qubits: usize) -> Result<Self> {
        let mut v: Vec<usize> = indices.into_iter().collect();
        v.sort_unstable();
        if v.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidQubitSet(format!("duplicate index in {v:?}")));
        }
        if let Some(&last) = v.last() {
            if last >= num_qubits {
                return Err(Error::InvalidQubitSet(format!(
                    "index {last} out of range for {num_qubits} qubits"
                )));
            }
        }
        Ok(Self(v))
    }

    pub fn full(num_qubits: usize) -> Self {
        Self((0..num_qubits).collect())
    }

    pub fn single(q: usize) -> Self {
        Self(vec![q])
    }

    /// Qubits whose bit is set in `mask` (bit `q` ↔ qubit `q`).
    pub fn from_mask(mask: u64) -> Self {
        Self((0..64).filter(|q| mask >> q & 1 == 1).collect())
    }

    pub fn mask(&self) -> u64 {
        self.0.iter().fold(0, |m, q| m | 1 << q)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn contains(&self, q: usize) -> bool {
        self.0.binary_search(&q).is_ok()
    }

    pub fn complement(&self, num_qubits: usize) -> Self {
        Self((0..num_qubits).filter(|q| !self.contains(*q)).collect())
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.mask() & other.mask() == 0
    }

    pub fn intersects(&self, other: &Self) -> bool {
        !self.is_disjoint(other)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.mask() & !other.mask() == 0
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::from_mask(self.mask() | other.mask())
    }

    pub fn difference(&self, other: &Self) -> Self {
        Self::from_mask(self.mask() & !other.mask())
    }
}

impl fmt::Display for QubitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, q) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{q}")?;
        }
        write!(f, "}}")
    }
}

/// Checks that `blocks` are pairwise disjoint and cover `0..num_qubits`.
pub fn check_partition(blocks: &[QubitSet], num_qubits: usize) -> Result<()> {
    let mut seen = 0u64;
    for b in blocks {
        if b.is_empty() {
            return Err(Error::InvalidQubitSet("empty block".into()));
        }
        if let Some(q) = b.iter().find(|&q| q >= num_qubits) {
            return Err(Error::InvalidQubitSet(format!("qubit {q} out of range")));
        }
        if seen & b.mask() != 0 {
            return Err(Error::InvalidQubitSet(format!("block {b} overlaps another block")));
        }
        seen |= b.mask();
    }
    let full = if num_qubits == 64 { u64::MAX } else { (1u64 << num_qubits) - 1 };
    if seen != full {
        return Err(Error::InvalidQubitSet(format!(
            "blocks do not cover all {num_qubits} qubits"
        )));
    }
    Ok(())
}

/// Bit position of qubit `q` in a basis index (qubit 0 is the most
/// significant bit).
#[inline]
pub(crate) fn bit_of(q: usize, num_qubits: usize) -> usize {
    num_qubits - 1 - q
}

/// Index of basis state `index` restricted to `qubits` (first listed qubit
/// becomes the most significant bit of the result).
#[inline]
pub(crate) fn sub_index(index: usize, qubits: &[usize], num_qubits: usize) -> usize {
    qubits
        .iter()
        .fold(0, |acc, &q| (acc << 1) | (index >> bit_of(q, num_qubits) & 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_order_and_rejects_bad_input() {
        let s = QubitSet::new([2, 0], 3).unwrap();
        assert_eq!(s.indices(), &[0, 2]);
        assert!(QubitSet::new([1, 1], 3).is_err());
        assert!(QubitSet::new([3], 3).is_err());
        assert_eq!(s.complement(3).indices(), &[1]);
        assert_eq!(s.to_string(), "{0,2}");
    }

    #[test]
    fn partition_check() {
        let a = QubitSet::new([0, 1], 3).unwrap();
        let b = QubitSet::new([2], 3).unwrap();
        assert!(check_partition(&[a.clone(), b.clone()], 3).is_ok());
        assert!(check_partition(&[a.clone()], 3).is_err());
        assert!(check_partition(&[a.clone(), a], 3).is_err());
    }

    #[test]
    fn sub_index_uses_msb_first_layout() {
        // |q0 q1 q2> = |1 0 1> = index 5
        assert_eq!(sub_index(5, &[0, 2], 3), 0b11);
        assert_eq!(sub_index(5, &[1], 3), 0);
        assert_eq!(sub_index(5, &[2, 0], 3), 0b11);
    }
}
