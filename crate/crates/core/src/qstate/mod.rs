//! Pure multi-qubit states and the linear algebra built on them: inner and
//! tensor products, reduced density matrices, purity and entropies.

mod operator;
mod qubits;
mod state;

pub use operator::{DensityMatrix, Eigenspace, HermitianOperator, DEGENERACY_TOLERANCE};
pub use qubits::{check_partition, QubitSet};
pub use state::{StateFile, StateVector};

pub(crate) use qubits::bit_of;

use crate::error::{Error, Result};
use crate::linalg::{dot, CMatrix};
use crate::scalar::{czero, Real, C};

/// Eigenvalues at or below this are treated as exact zeros in entropies.
pub const ENTROPY_CUTOFF: f64 = 1e-12;

/// `⟨a|b⟩`, conjugate-linear in `a`.
pub fn inner_product<T: Real>(a: &StateVector<T>, b: &StateVector<T>) -> Result<C<T>> {
    if a.num_qubits() != b.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: a.num_qubits(),
            found: b.num_qubits(),
        });
    }
    Ok(dot(a.amplitudes(), b.amplitudes()))
}

/// `a ⊗ b`: the qubits of `a` come first.
pub fn tensor_product<T: Real>(a: &StateVector<T>, b: &StateVector<T>) -> Result<StateVector<T>> {
    let n = a.num_qubits() + b.num_qubits();
    state::check_qubit_count(n)?;
    let mut amps = Vec::with_capacity(1 << n);
    for x in a.amplitudes() {
        for y in b.amplitudes() {
            amps.push(*x * *y);
        }
    }
    Ok(StateVector::from_parts_unchecked(n, amps))
}

/// Basis-index offsets contributed by each bit pattern of `qubits`.
///
/// `offsets[p]` has the bits of pattern `p` (first qubit most significant)
/// placed at the qubits' positions in a full basis index.
pub(crate) fn pattern_offsets(qubits: &[usize], num_qubits: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(1 << qubits.len());
    out.push(0);
    for &q in qubits {
        let bit = 1usize << bit_of(q, num_qubits);
        let len = out.len();
        out.resize(2 * len, 0);
        // Spread in place from the back so qubits[0] ends up most significant.
        for i in (0..len).rev() {
            let x = out[i];
            out[2 * i] = x;
            out[2 * i + 1] = x | bit;
        }
    }
    out
}

pub(crate) fn check_subset(set: &QubitSet, num_qubits: usize) -> Result<()> {
    if set.is_empty() {
        return Err(Error::InvalidCut("empty qubit set".into()));
    }
    if let Some(q) = set.iter().find(|&q| q >= num_qubits) {
        return Err(Error::InvalidCut(format!(
            "qubit {q} out of range for {num_qubits} qubits"
        )));
    }
    Ok(())
}

pub(crate) fn check_proper_subset(set: &QubitSet, num_qubits: usize) -> Result<()> {
    check_subset(set, num_qubits)?;
    if set.len() == num_qubits {
        return Err(Error::InvalidCut("cut contains every qubit".into()));
    }
    Ok(())
}

/// Reduced matrix over `keep` without validation.
pub(crate) fn reduced_matrix<T: Real>(amps: &[C<T>], keep: &[usize], num_qubits: usize) -> CMatrix<T> {
    let keep_off = pattern_offsets(keep, num_qubits);
    let keep_mask = keep_off.iter().fold(0, |m, &k| m | k);
    let d = keep_off.len();
    // Upper triangle, row-major, accumulated in a flat buffer.
    let mut acc = vec![czero::<T>(); d * d];
    let mut g = vec![czero::<T>(); d];
    for e in (0..amps.len()).filter(|e| e & keep_mask == 0) {
        for (slot, &k) in g.iter_mut().zip(&keep_off) {
            *slot = amps[e | k];
        }
        for a in 0..d {
            let ga = g[a];
            let row = &mut acc[a * d..(a + 1) * d];
            for b in a..d {
                row[b] = row[b] + ga * g[b].conj();
            }
        }
    }
    let mut rho = CMatrix::zeros(d);
    for a in 0..d {
        rho[(a, a)] = C::new(acc[a * d + a].re, T::zero());
        for b in (a + 1)..d {
            rho[(a, b)] = acc[a * d + b];
            rho[(b, a)] = acc[a * d + b].conj();
        }
    }
    rho
}

/// `Tr_{complement}(|s⟩⟨s|)`, indexed with the first kept qubit as the most
/// significant bit.
pub fn partial_trace<T: Real>(s: &StateVector<T>, keep: &QubitSet) -> Result<DensityMatrix<T>> {
    check_subset(keep, s.num_qubits())?;
    Ok(DensityMatrix::from_matrix_unchecked(reduced_matrix(
        s.amplitudes(),
        keep.indices(),
        s.num_qubits(),
    )))
}

/// `Tr(ρ²)`.
pub fn purity<T: Real>(rho: &DensityMatrix<T>) -> T {
    // Tr(ρ²) = Σᵢⱼ |ρᵢⱼ|² for Hermitian ρ.
    rho.matrix().frobenius_sq()
}

/// Purity of the reduced state of `set`, evaluated on whichever side of the
/// cut is smaller (both sides of a pure state share their spectrum).
pub fn subsystem_purity<T: Real>(s: &StateVector<T>, set: &QubitSet) -> Result<T> {
    check_subset(set, s.num_qubits())?;
    let n = s.num_qubits();
    if set.len() == n {
        return Ok(crate::linalg::norm_sqr(s.amplitudes()).powi(2));
    }
    let side = smaller_side(set, n);
    Ok(reduced_matrix(s.amplitudes(), side.indices(), n).frobenius_sq())
}

fn smaller_side(set: &QubitSet, num_qubits: usize) -> QubitSet {
    if 2 * set.len() <= num_qubits {
        set.clone()
    } else {
        set.complement(num_qubits)
    }
}

/// `−Σ λ log₂ λ` over eigenvalues above [`ENTROPY_CUTOFF`].
pub fn von_neumann_entropy<T: Real>(rho: &DensityMatrix<T>) -> T {
    entropy_of_spectrum(&rho.eigenvalues())
}

pub(crate) fn entropy_of_spectrum<T: Real>(eigenvalues: &[T]) -> T {
    let cutoff = T::lit(ENTROPY_CUTOFF);
    let s: T = eigenvalues
        .iter()
        .filter(|&&l| l > cutoff)
        .map(|&l| -l * l.log2())
        .sum();
    s.max(T::zero())
}

/// Von Neumann entropy (bits) of the reduced state of `cut`.
pub fn entanglement_entropy<T: Real>(s: &StateVector<T>, cut: &QubitSet) -> Result<T> {
    let n = s.num_qubits();
    check_proper_subset(cut, n)?;
    let side = smaller_side(cut, n);
    let rho = reduced_matrix(s.amplitudes(), side.indices(), n);
    Ok(entropy_of_spectrum(&crate::linalg::eigvalsh(&rho)))
}

/// `S(ρᵢ) + S(ρⱼ) − S(ρᵢⱼ)` in bits.
pub fn mutual_information<T: Real>(s: &StateVector<T>, i: usize, j: usize) -> Result<T> {
    let n = s.num_qubits();
    if i == j {
        return Err(Error::InvalidArgument(format!("mutual information needs distinct qubits, got {i} twice")));
    }
    if i >= n || j >= n {
        return Err(Error::InvalidCut(format!("qubit pair ({i}, {j}) out of range for {n} qubits")));
    }
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    let rho_ab = reduced_matrix(s.amplitudes(), &[a, b], n);
    Ok(mutual_information_from_pair(&rho_ab))
}

/// Mutual information from a two-qubit reduced matrix.
pub(crate) fn mutual_information_from_pair<T: Real>(rho_ab: &CMatrix<T>) -> T {
    let (rho_a, rho_b) = marginals_of_pair(rho_ab);
    let sa = entropy_of_spectrum(&crate::linalg::eigvalsh(&rho_a));
    let sb = entropy_of_spectrum(&crate::linalg::eigvalsh(&rho_b));
    let sab = entropy_of_spectrum(&crate::linalg::eigvalsh(rho_ab));
    let mi = sa + sb - sab;
    if mi < T::zero() && mi >= T::lit(-1e-9) {
        T::zero()
    } else {
        mi
    }
}

fn marginals_of_pair<T: Real>(rho: &CMatrix<T>) -> (CMatrix<T>, CMatrix<T>) {
    // Index layout: 2·a + b.
    let mut ra = CMatrix::zeros(2);
    let mut rb = CMatrix::zeros(2);
    for x in 0..2 {
        for y in 0..2 {
            for k in 0..2 {
                ra[(x, y)] = ra[(x, y)] + rho[(2 * x + k, 2 * y + k)];
                rb[(x, y)] = rb[(x, y)] + rho[(2 * k + x, 2 * k + y)];
            }
        }
    }
    (ra, rb)
}

/// Entropy of every single-qubit reduced state.
pub fn single_qubit_entropies<T: Real>(s: &StateVector<T>) -> Vec<T> {
    let n = s.num_qubits();
    (0..n)
        .map(|q| {
            let rho = reduced_matrix(s.amplitudes(), &[q], n);
            entropy_of_spectrum(&crate::linalg::eigvalsh(&rho))
        })
        .collect()
}

/// Symmetric matrix of pairwise mutual informations (zero diagonal).
pub fn mutual_information_matrix<T: Real>(s: &StateVector<T>) -> Vec<Vec<T>> {
    let n = s.num_qubits();
    let mut out = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let mi = mutual_information_from_pair(&reduced_matrix(s.amplitudes(), &[i, j], n));
            out[i][j] = mi;
            out[j][i] = mi;
        }
    }
    out
}
