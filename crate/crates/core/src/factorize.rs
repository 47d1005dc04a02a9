//! Finest tensor factorization of a pure state and the classicity measure
//! derived from its block count.
//!
//! A subset of qubits is a tensor factor exactly when its reduced state is
//! pure. The pure subsets of a pure state are closed under intersection and
//! complement, so there is a unique finest partition into factor blocks.
//! [`finest_factorization`] finds it by searching for the smallest pure
//! subset of each block; [`brute_force_factorization`] enumerates every set
//! partition and serves as a test oracle for small registers.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::fix_phase;
use crate::qstate::{
    check_proper_subset, mutual_information_from_pair, pattern_offsets, reduced_matrix, subsystem_purity,
    QubitSet, StateVector,
};
use crate::scalar::{czero, Real, C};

/// Default purity-deficit threshold.
pub const DEFAULT_EPS: f64 = 1e-10;

/// Largest register accepted by [`brute_force_factorization`].
pub const BRUTE_FORCE_MAX_QUBITS: usize = 8;

/// Partition of a register into tensor-factor blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorPartition<T: Real> {
    num_qubits: usize,
    blocks: Vec<QubitSet>,
    block_states: Option<Vec<StateVector<T>>>,
    near_threshold: bool,
}

impl<T: Real> FactorPartition<T> {
    /// Partition without factor states. Blocks are validated and sorted by
    /// their smallest qubit.
    pub fn from_blocks(num_qubits: usize, mut blocks: Vec<QubitSet>) -> Result<Self> {
        crate::qstate::check_partition(&blocks, num_qubits)?;
        blocks.sort_by_key(|b| b.first());
        Ok(Self {
            num_qubits,
            blocks,
            block_states: None,
            near_threshold: false,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn blocks(&self) -> &[QubitSet] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Factor states, one per block, in block order.
    pub fn block_states(&self) -> Option<&[StateVector<T>]> {
        self.block_states.as_deref()
    }

    /// Set when some candidate subset had purity inside the band
    /// `[1 − 10·eps, 1 − eps]`, i.e. the split decision is numerically fragile.
    pub fn near_threshold(&self) -> bool {
        self.near_threshold
    }

    /// Index of the block holding qubit `q`.
    pub fn block_of(&self, q: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(q))
    }

    /// Tensor product of the block states in the original qubit order.
    pub fn reconstruct(&self) -> Option<StateVector<T>> {
        let states = self.block_states.as_ref()?;
        let factors: Vec<_> = self.blocks.iter().cloned().zip(states.iter().cloned()).collect();
        StateVector::from_factors(self.num_qubits, &factors).ok()
    }

    pub fn without_states(&self) -> Self {
        Self {
            block_states: None,
            ..self.clone()
        }
    }

    pub fn to_export(&self) -> PartitionExport {
        PartitionExport {
            blocks: self.blocks.iter().map(|b| b.indices().to_vec()).collect(),
            classicity: classicity_of(self.blocks.len(), self.num_qubits).ok(),
            near_threshold: self.near_threshold,
        }
    }
}

/// JSON form: `{"blocks": [[0,1],[2]], "classicity": 0.63…}`.
///
/// `classicity` is `null` for a single-qubit register.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionExport {
    pub blocks: Vec<Vec<usize>>,
    pub classicity: Option<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub near_threshold: bool,
}

/// Number of eigenvalues of the reduced state of `cut` above `eps`.
pub fn schmidt_rank<T: Real>(s: &StateVector<T>, cut: &QubitSet, eps: T) -> Result<usize> {
    check_eps(eps)?;
    let n = s.num_qubits();
    check_proper_subset(cut, n)?;
    let side = if 2 * cut.len() <= n { cut.clone() } else { cut.complement(n) };
    let rho = reduced_matrix(s.amplitudes(), side.indices(), n);
    Ok(crate::linalg::eigvalsh(&rho).into_iter().filter(|&l| l > eps).count())
}

/// Whether `sub` is a tensor factor: purity of its reduced state ≥ 1 − eps.
pub fn is_product<T: Real>(s: &StateVector<T>, sub: &QubitSet, eps: T) -> Result<bool> {
    check_eps(eps)?;
    check_proper_subset(sub, s.num_qubits())?;
    Ok(subsystem_purity(s, sub)? >= T::one() - eps)
}

fn check_eps<T: Real>(eps: T) -> Result<()> {
    if !(eps > T::zero()) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    Ok(())
}

/// Smallest purity deficit the scalar type can resolve after a few hundred
/// jumps. Below it round-off reads as entanglement, which matters for f32.
pub fn precision_floor<T: Real>() -> T {
    T::epsilon() * T::lit(1e3)
}

/// Pairwise mutual information above this marks two qubits as necessarily
/// sharing a block. A purity deficit of `10·eps` bounds the mutual
/// information across a cut at roughly `300·eps` bits, so candidates in the
/// near-threshold band are never pruned.
pub fn pruning_threshold<T: Real>(eps: T) -> T {
    eps * T::lit(1e4)
}

/// Unique finest factorization, with factor states extracted per block.
///
/// For each block the search tries subsets in increasing size (up to half
/// the block) and lexicographic order; the first pure one is split off and
/// both parts are searched again. Candidates must be unions of connected
/// components of the mutual-information graph, which only removes subsets
/// that cannot be pure.
pub fn finest_factorization<T: Real>(s: &StateVector<T>, eps: T) -> Result<FactorPartition<T>> {
    check_eps(eps)?;
    let n = s.num_qubits();
    let units = correlation_components(s, pruning_threshold(eps));
    let band_low = T::one() - eps * T::lit(10.0);
    let accept = T::one() - eps;

    let mut near_threshold = false;
    let mut pending = vec![QubitSet::full(n)];
    let mut finished: Vec<QubitSet> = Vec::new();

    while let Some(block) = pending.pop() {
        let split = if block.len() < 2 {
            None
        } else {
            find_minimal_pure_subset(s, &block, &units, |p| {
                if p >= band_low && p <= accept {
                    near_threshold = true;
                }
                p >= accept
            })?
        };
        match split {
            Some(sub) => {
                let rest = block.difference(&sub);
                pending.push(rest);
                pending.push(sub);
            }
            None => finished.push(block),
        }
    }

    finished.sort_by_key(|b| b.first());
    if near_threshold {
        log::warn!("factorization of a near-threshold state (eps = {eps})");
    }
    let block_states = extract_block_states(s, &finished);
    Ok(FactorPartition {
        num_qubits: n,
        blocks: finished,
        block_states: Some(block_states),
        near_threshold,
    })
}

/// Connected components of the graph linking qubits whose pairwise mutual
/// information exceeds `threshold`, as bit masks.
fn correlation_components<T: Real>(s: &StateVector<T>, threshold: T) -> Vec<u64> {
    let n = s.num_qubits();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri == rj {
                continue;
            }
            let mi = mutual_information_from_pair(&reduced_matrix(s.amplitudes(), &[i, j], n));
            if mi > threshold {
                parent[rj.max(ri)] = ri.min(rj);
            }
        }
    }
    let mut masks: HashMap<usize, u64> = HashMap::new();
    for q in 0..n {
        let r = find(&mut parent, q);
        *masks.entry(r).or_default() |= 1 << q;
    }
    let mut out: Vec<u64> = masks.into_values().collect();
    out.sort_unstable();
    out
}

fn find_minimal_pure_subset<T: Real>(
    s: &StateVector<T>,
    block: &QubitSet,
    units: &[u64],
    mut accept: impl FnMut(T) -> bool,
) -> Result<Option<QubitSet>> {
    let members = block.indices();
    let block_mask = block.mask();
    let local_units: Vec<u64> = units.iter().map(|u| u & block_mask).filter(|&u| u != 0).collect();
    if local_units.len() < 2 {
        return Ok(None);
    }
    let is_union = |mask: u64| local_units.iter().all(|&u| mask & u == 0 || mask & u == u);

    for k in 1..=members.len() / 2 {
        let mut combo: Vec<usize> = (0..k).collect();
        loop {
            let mask = combo.iter().fold(0u64, |m, &i| m | 1 << members[i]);
            if is_union(mask) {
                let candidate = QubitSet::from_mask(mask);
                if accept(subsystem_purity(s, &candidate)?) {
                    return Ok(Some(candidate));
                }
            }
            if !next_combination(&mut combo, members.len()) {
                break;
            }
        }
    }
    Ok(None)
}

/// Advances `combo` to the next k-combination of `0..n` in lexicographic
/// order; returns false after the last one.
fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in (i + 1)..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn extract_block_states<T: Real>(s: &StateVector<T>, blocks: &[QubitSet]) -> Vec<StateVector<T>> {
    blocks
        .iter()
        .map(|b| {
            if b.len() == s.num_qubits() {
                s.phase_fixed()
            } else {
                dominant_factor(s, b)
            }
        })
        .collect()
}

/// Dominant eigenvector of the reduced state of `block`, by power iteration
/// on `ρ = M M†` where `M` is the state reshaped to (block × rest). The
/// matrix `ρ` is never formed. Phase fixed so the largest entry is real
/// positive.
fn dominant_factor<T: Real>(s: &StateVector<T>, block: &QubitSet) -> StateVector<T> {
    let n = s.num_qubits();
    let amps = s.amplitudes();
    let keep = pattern_offsets(block.indices(), n);
    let rest = block.complement(n);
    let env = pattern_offsets(rest.indices(), n);

    let mut diag = vec![T::zero(); keep.len()];
    for &e in &env {
        for (d, &k) in diag.iter_mut().zip(&keep) {
            *d = *d + amps[e | k].norm_sqr();
        }
    }
    let start = diag
        .iter()
        .enumerate()
        .fold((0, T::zero()), |best, (i, &d)| if d > best.1 { (i, d) } else { best })
        .0;
    let mut v = vec![czero::<T>(); keep.len()];
    v[start] = C::new(T::one(), T::zero());

    let mut w = vec![czero::<T>(); env.len()];
    for _ in 0..100 {
        for (we, &e) in w.iter_mut().zip(&env) {
            *we = keep
                .iter()
                .zip(&v)
                .fold(czero(), |acc, (&k, va)| acc + amps[e | k].conj() * *va);
        }
        let mut next = vec![czero::<T>(); keep.len()];
        for (we, &e) in w.iter().zip(&env) {
            for (nx, &k) in next.iter_mut().zip(&keep) {
                *nx = *nx + amps[e | k] * *we;
            }
        }
        let norm = crate::linalg::norm_sqr(&next).sqrt();
        for z in &mut next {
            *z = *z / norm;
        }
        let overlap = crate::linalg::dot(&v, &next).norm();
        v = next;
        if T::one() - overlap < T::lit(1e-15) {
            break;
        }
    }
    fix_phase(&mut v);
    StateVector::normalized(block.len(), v).expect("power iterate has unit norm")
}

/// Oracle: enumerates every set partition of the register and returns the
/// one with the most blocks whose blocks are all tensor factors.
pub fn brute_force_factorization<T: Real>(s: &StateVector<T>, eps: T) -> Result<FactorPartition<T>> {
    check_eps(eps)?;
    let n = s.num_qubits();
    if n > BRUTE_FORCE_MAX_QUBITS {
        return Err(Error::TooManyQubitsForBruteForce { found: n });
    }
    let full = (1u64 << n) - 1;
    let mut memo: HashMap<u64, bool> = HashMap::new();
    let mut pure = |mask: u64| -> Result<bool> {
        if mask == full {
            return Ok(true);
        }
        if let Some(&v) = memo.get(&mask) {
            return Ok(v);
        }
        let v = is_product(s, &QubitSet::from_mask(mask), eps)?;
        memo.insert(mask, v);
        Ok(v)
    };

    let mut best: Option<Vec<u64>> = None;
    // Restricted growth strings enumerate each set partition exactly once.
    let mut labels = vec![0usize; n];
    loop {
        let count = labels.iter().max().map_or(0, |m| m + 1);
        let mut masks = vec![0u64; count];
        for (q, &l) in labels.iter().enumerate() {
            masks[l] |= 1 << q;
        }
        if best.as_ref().is_none_or(|b| masks.len() > b.len()) {
            let mut ok = true;
            for &m in &masks {
                if !pure(m)? {
                    ok = false;
                    break;
                }
            }
            if ok {
                best = Some(masks);
            }
        }
        if !next_restricted_growth(&mut labels) {
            break;
        }
    }

    let blocks: Vec<QubitSet> = best
        .expect("single-block partition always qualifies")
        .into_iter()
        .map(QubitSet::from_mask)
        .collect();
    let mut partition = FactorPartition::from_blocks(n, blocks)?;
    partition.block_states = Some(extract_block_states(s, &partition.blocks));
    Ok(partition)
}

fn next_restricted_growth(labels: &mut [usize]) -> bool {
    let n = labels.len();
    let mut i = n;
    while i > 1 {
        i -= 1;
        let max_prefix = labels[..i].iter().copied().max().unwrap_or(0);
        if labels[i] <= max_prefix {
            labels[i] += 1;
            for l in labels[i + 1..].iter_mut() {
                *l = 0;
            }
            return true;
        }
    }
    false
}

/// `ln(blocks) / ln(N)`.
pub fn classicity<T: Real>(partition: &FactorPartition<T>) -> Result<T> {
    classicity_of(partition.num_blocks(), partition.num_qubits()).map(T::lit)
}

/// Classicity for `num_blocks` factors of an `num_qubits`-qubit register.
pub fn classicity_of(num_blocks: usize, num_qubits: usize) -> Result<f64> {
    if num_qubits < 2 {
        return Err(Error::ClassicityUndefined);
    }
    if num_blocks == 0 || num_blocks > num_qubits {
        return Err(Error::InvalidArgument(format!(
            "{num_blocks} blocks impossible for {num_qubits} qubits"
        )));
    }
    Ok((num_blocks as f64).ln() / (num_qubits as f64).ln())
}
