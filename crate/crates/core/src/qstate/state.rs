use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::qubits::{sub_index, QubitSet};
use crate::error::{Error, Result};
use crate::linalg::{dot, fix_phase, norm_sqr};
use crate::scalar::{cone, czero, Real, C};
use crate::MAX_QUBITS;

/// Pure state of an `N`-qubit register.
///
/// Amplitudes are indexed by the binary basis label with qubit 0 as the most
/// significant bit. Construction enforces unit norm.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T: Real> {
    num_qubits: usize,
    amplitudes: Vec<C<T>>,
}

pub(crate) fn check_qubit_count(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 || num_qubits > MAX_QUBITS {
        return Err(Error::QubitCount(num_qubits));
    }
    Ok(())
}

impl<T: Real> StateVector<T> {
    /// Validated constructor: length must be `2^num_qubits` and the norm must
    /// be one within [`Real::NORM_TOLERANCE`].
    pub fn new(num_qubits: usize, amplitudes: Vec<C<T>>) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        if amplitudes.len() != 1 << num_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1 << num_qubits,
                found: amplitudes.len(),
            });
        }
        let norm = norm_sqr(&amplitudes).sqrt().as_f64();
        if !norm.is_finite() || (norm - 1.0).abs() > T::NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(num_qubits: usize, mut amplitudes: Vec<C<T>>) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        if amplitudes.len() != 1 << num_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1 << num_qubits,
                found: amplitudes.len(),
            });
        }
        let norm = norm_sqr(&amplitudes).sqrt();
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(Error::NotNormalized { norm: norm.as_f64() });
        }
        for z in &mut amplitudes {
            *z = *z / norm;
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for {num_qubits} qubits"
            )));
        }
        let mut amplitudes = vec![czero(); dim];
        amplitudes[index] = cone();
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    /// Basis state from a string of `0`/`1`, qubit 0 first.
    pub fn from_bitstring(bits: &str) -> Result<Self> {
        let mut index = 0usize;
        for ch in bits.chars() {
            index = (index << 1)
                | match ch {
                    '0' => 0,
                    '1' => 1,
                    _ => return Err(Error::InvalidArgument(format!("bad bit {ch:?}"))),
                };
        }
        Self::basis(bits.len(), index)
    }

    /// `(|0⟩ + |1⟩)/√2`
    pub fn plus() -> Self {
        let h = C::new(T::FRAC_1_SQRT_2(), T::zero());
        Self {
            num_qubits: 1,
            amplitudes: vec![h, h],
        }
    }

    /// `(|00⟩ + |11⟩)/√2`
    pub fn bell() -> Self {
        Self::ghz(2).expect("2 qubits in range")
    }

    /// `(|0…0⟩ + |1…1⟩)/√2`
    pub fn ghz(num_qubits: usize) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        let dim = 1usize << num_qubits;
        let h = C::new(T::FRAC_1_SQRT_2(), T::zero());
        let mut amplitudes = vec![czero(); dim];
        amplitudes[0] = h;
        amplitudes[dim - 1] = amplitudes[dim - 1] + h;
        Self::normalized(num_qubits, amplitudes)
    }

    /// Equal superposition of all single-excitation basis states.
    pub fn w(num_qubits: usize) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        let mut amplitudes = vec![czero(); 1 << num_qubits];
        for q in 0..num_qubits {
            amplitudes[1 << q] = cone();
        }
        Self::normalized(num_qubits, amplitudes)
    }

    /// Haar-random state.
    pub fn haar_random<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        let amplitudes = crate::random::haar_vector(1 << num_qubits, rng);
        Self::normalized(num_qubits, amplitudes)
    }

    /// Assembles a state from factor states living on disjoint qubit blocks
    /// that together cover the register.
    pub fn from_factors(num_qubits: usize, factors: &[(QubitSet, StateVector<T>)]) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        let blocks: Vec<QubitSet> = factors.iter().map(|(b, _)| b.clone()).collect();
        super::qubits::check_partition(&blocks, num_qubits)?;
        for (b, s) in factors {
            if s.num_qubits != b.len() {
                return Err(Error::DimensionMismatch {
                    expected: b.len(),
                    found: s.num_qubits,
                });
            }
        }
        let amplitudes = (0..1usize << num_qubits)
            .map(|i| {
                factors.iter().fold(cone(), |acc, (b, s)| {
                    acc * s.amplitudes[sub_index(i, b.indices(), num_qubits)]
                })
            })
            .collect();
        Self::normalized(num_qubits, amplitudes)
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    #[inline]
    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C<T>> {
        self.amplitudes
    }

    pub fn norm(&self) -> T {
        norm_sqr(&self.amplitudes).sqrt()
    }

    /// `|⟨self|other⟩|²`; panics on dimension mismatch only in debug builds.
    pub fn fidelity(&self, other: &Self) -> T {
        debug_assert_eq!(self.dim(), other.dim());
        dot(&self.amplitudes, &other.amplitudes).norm_sqr()
    }

    /// Equal up to a global phase within elementwise tolerance `tol`.
    pub fn approx_eq_up_to_phase(&self, other: &Self, tol: T) -> bool {
        if self.num_qubits != other.num_qubits {
            return false;
        }
        let a = self.phase_fixed();
        let b = other.phase_fixed();
        a.amplitudes
            .iter()
            .zip(&b.amplitudes)
            .all(|(x, y)| (*x - *y).norm() <= tol)
    }

    /// Copy with the largest-magnitude amplitude made real and positive.
    pub fn phase_fixed(&self) -> Self {
        let mut amplitudes = self.amplitudes.clone();
        fix_phase(&mut amplitudes);
        Self {
            num_qubits: self.num_qubits,
            amplitudes,
        }
    }

    /// SHA-256 over the little-endian `f64` encoding of all amplitudes.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        for z in &self.amplitudes {
            hasher.update(z.re.as_f64().to_le_bytes());
            hasher.update(z.im.as_f64().to_le_bytes());
        }
        hex::encode(hasher.finalize())
    }

    pub(crate) fn from_parts_unchecked(num_qubits: usize, amplitudes: Vec<C<T>>) -> Self {
        Self {
            num_qubits,
            amplitudes,
        }
    }

    pub fn to_file(&self) -> StateFile {
        StateFile {
            num_qubits: self.num_qubits,
            amplitudes: self
                .amplitudes
                .iter()
                .map(|z| [z.re.as_f64(), z.im.as_f64()])
                .collect(),
        }
    }

    pub fn from_file(file: &StateFile) -> Result<Self> {
        let amplitudes = file
            .amplitudes
            .iter()
            .map(|[re, im]| C::new(T::lit(*re), T::lit(*im)))
            .collect();
        Self::new(file.num_qubits, amplitudes)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("state serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: StateFile = serde_json::from_str(text)?;
        Self::from_file(&file)
    }
}

/// On-disk JSON form of a state: `{"num_qubits": N, "amplitudes": [[re, im], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub num_qubits: usize,
    pub amplitudes: Vec<[f64; 2]>,
}
