use crate::error::{Error, Result};
use crate::linalg::norm_sqr;
use crate::qstate::{check_partition, pattern_offsets, HermitianOperator, QubitSet, StateVector};
use crate::scalar::{czero, Real, C};

/// Probability mass at or below which an outcome branch is dropped.
pub const PROBABILITY_FLOOR: f64 = 1e-15;

/// One block of a test: a Hermitian operator acting on a set of qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct TestBlock<T: Real> {
    pub qubits: QubitSet,
    pub operator: HermitianOperator<T>,
}

/// A generalized test: Hermitian operators on disjoint qubit blocks that
/// together cover the register. Blocks are kept in ascending order of their
/// first qubit, which fixes the outcome label order.
#[derive(Clone, Debug, PartialEq)]
pub struct TestSpec<T: Real> {
    num_qubits: usize,
    blocks: Vec<TestBlock<T>>,
}

impl<T: Real> TestSpec<T> {
    pub fn new(num_qubits: usize, blocks: Vec<(QubitSet, HermitianOperator<T>)>) -> Result<Self> {
        let sets: Vec<QubitSet> = blocks.iter().map(|(q, _)| q.clone()).collect();
        check_partition(&sets, num_qubits).map_err(|e| Error::InvalidTest(e.to_string()))?;
        let mut blocks: Vec<TestBlock<T>> = blocks
            .into_iter()
            .map(|(qubits, operator)| TestBlock { qubits, operator })
            .collect();
        for b in &blocks {
            if b.operator.dim() != 1 << b.qubits.len() {
                return Err(Error::InvalidTest(format!(
                    "operator of dimension {} on block {} of {} qubits",
                    b.operator.dim(),
                    b.qubits,
                    b.qubits.len()
                )));
            }
        }
        blocks.sort_by_key(|b| b.qubits.first());
        Ok(Self { num_qubits, blocks })
    }

    /// Same operator on every qubit individually.
    pub fn per_qubit(num_qubits: usize, operator: &HermitianOperator<T>) -> Result<Self> {
        Self::new(
            num_qubits,
            (0..num_qubits).map(|q| (QubitSet::single(q), operator.clone())).collect(),
        )
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn blocks(&self) -> &[TestBlock<T>] {
        &self.blocks
    }
}

/// A joint outcome: one eigenspace index and eigenvalue per block, in block
/// order, with its Born probability.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome<T: Real> {
    pub indices: Vec<usize>,
    pub eigenvalues: Vec<T>,
    pub probability: T,
}

fn check_applicable<T: Real>(state: &StateVector<T>, test: &TestSpec<T>) -> Result<()> {
    if state.num_qubits() != test.num_qubits {
        return Err(Error::InvalidTest(format!(
            "test covers {} qubits, state has {}",
            test.num_qubits,
            state.num_qubits()
        )));
    }
    Ok(())
}

/// Applies the projector onto span(`basis`) to the qubits of `block`.
fn project_block<T: Real>(amps: &mut [C<T>], num_qubits: usize, block: &QubitSet, basis: &[Vec<C<T>>]) {
    let keep = pattern_offsets(block.indices(), num_qubits);
    let env = pattern_offsets(block.complement(num_qubits).indices(), num_qubits);
    let mut g = vec![czero::<T>(); keep.len()];
    let mut out = vec![czero::<T>(); keep.len()];
    for &e in &env {
        for (slot, &k) in g.iter_mut().zip(&keep) {
            *slot = amps[e | k];
        }
        out.iter_mut().for_each(|z| *z = czero());
        for v in basis {
            let c = crate::linalg::dot(v, &g);
            if c == czero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(v) {
                *o = *o + c * *x;
            }
        }
        for (&k, o) in keep.iter().zip(&out) {
            amps[e | k] = *o;
        }
    }
}

/// Born-rule distribution of joint outcomes, in label order (blocks by first
/// qubit, eigenvalues ascending within a block). Outcomes with probability
/// at or below [`PROBABILITY_FLOOR`] are omitted.
pub fn outcome_distribution<T: Real>(state: &StateVector<T>, test: &TestSpec<T>) -> Result<Vec<Outcome<T>>> {
    check_applicable(state, test)?;
    let mut out = Vec::new();
    let mut indices = Vec::with_capacity(test.blocks.len());
    let mut values = Vec::with_capacity(test.blocks.len());
    enumerate(
        state.amplitudes().to_vec(),
        state.num_qubits(),
        &test.blocks,
        &mut indices,
        &mut values,
        &mut out,
    );
    Ok(out)
}

fn enumerate<T: Real>(
    amps: Vec<C<T>>,
    num_qubits: usize,
    blocks: &[TestBlock<T>],
    indices: &mut Vec<usize>,
    values: &mut Vec<T>,
    out: &mut Vec<Outcome<T>>,
) {
    let floor = T::lit(PROBABILITY_FLOOR);
    let Some((block, rest)) = blocks.split_first() else {
        let p = norm_sqr(&amps);
        if p > floor {
            out.push(Outcome {
                indices: indices.clone(),
                eigenvalues: values.clone(),
                probability: p,
            });
        }
        return;
    };
    let spectrum = block.operator.spectrum();
    let trivial = block.operator.is_trivial();
    for (k, space) in spectrum.iter().enumerate() {
        let branch = if trivial {
            amps.clone()
        } else {
            let mut b = amps.clone();
            project_block(&mut b, num_qubits, &block.qubits, &space.basis);
            b
        };
        if norm_sqr(&branch) <= floor {
            continue;
        }
        indices.push(k);
        values.push(space.eigenvalue);
        enumerate(branch, num_qubits, rest, indices, values, out);
        indices.pop();
        values.pop();
    }
}

/// Inverse-CDF sample of the joint outcome for a uniform draw `u ∈ [0, 1)`,
/// followed by Lüders collapse onto the selected joint eigenspace.
///
/// Walking the blocks in label order and subtracting branch masses from `u`
/// selects the same outcome as inverse-CDF over the flattened list returned
/// by [`outcome_distribution`], without enumerating every leaf.
pub fn sample_outcome<T: Real>(
    state: &StateVector<T>,
    test: &TestSpec<T>,
    u: f64,
) -> Result<(Outcome<T>, StateVector<T>)> {
    check_applicable(state, test)?;
    if !(0.0..1.0).contains(&u) {
        return Err(Error::InvalidArgument(format!("uniform draw {u} outside [0, 1)")));
    }
    let n = state.num_qubits();
    let floor = T::lit(PROBABILITY_FLOOR);
    let mut remaining = T::lit(u) * norm_sqr(state.amplitudes());
    let mut current = state.amplitudes().to_vec();
    let mut indices = Vec::with_capacity(test.blocks.len());
    let mut eigenvalues = Vec::with_capacity(test.blocks.len());

    for block in &test.blocks {
        let spectrum = block.operator.spectrum();
        if block.operator.is_trivial() {
            indices.push(0);
            eigenvalues.push(spectrum[0].eigenvalue);
            continue;
        }
        let mut chosen: Option<(usize, Vec<C<T>>)> = None;
        let mut fallback: Option<(usize, Vec<C<T>>)> = None;
        for (k, space) in spectrum.iter().enumerate() {
            let mut branch = current.clone();
            project_block(&mut branch, n, &block.qubits, &space.basis);
            let mass = norm_sqr(&branch);
            if mass <= floor {
                continue;
            }
            if remaining < mass {
                chosen = Some((k, branch));
                break;
            }
            remaining = remaining - mass;
            fallback = Some((k, branch));
        }
        // Rounding can leave `remaining` just above the total mass; the last
        // nonzero branch then takes it.
        let (k, branch) = chosen.or(fallback).ok_or_else(|| {
            Error::Internal(format!("no outcome with nonzero probability on block {}", block.qubits))
        })?;
        indices.push(k);
        eigenvalues.push(spectrum[k].eigenvalue);
        current = branch;
    }

    let p = norm_sqr(&current);
    if !(p > T::zero()) {
        return Err(Error::Internal("sampled eigenspace has zero-norm projection".into()));
    }
    let next = StateVector::normalized(n, current)?;
    Ok((
        Outcome {
            indices,
            eigenvalues,
            probability: p,
        },
        next,
    ))
}

/// Largest `‖Aψ − λψ‖` over blocks, where `λ` is the recorded eigenvalue of
/// each block. Zero when `state` is a joint eigenstate of the test.
pub fn eigen_residual<T: Real>(state: &StateVector<T>, test: &TestSpec<T>, eigenvalues: &[T]) -> Result<T> {
    check_applicable(state, test)?;
    let n = state.num_qubits();
    let mut worst = T::zero();
    for (block, &lam) in test.blocks.iter().zip(eigenvalues) {
        let m = block.operator.matrix();
        let keep = pattern_offsets(block.qubits.indices(), n);
        let env = pattern_offsets(block.qubits.complement(n).indices(), n);
        let mut acc = T::zero();
        for &e in &env {
            let g: Vec<C<T>> = keep.iter().map(|&k| state.amplitudes()[e | k]).collect();
            let ag = m.mul_vec(&g)?;
            acc = acc + ag.iter().zip(&g).map(|(a, x)| (*a - *x * lam).norm_sqr()).sum::<T>();
        }
        worst = worst.max(acc.sqrt());
    }
    Ok(worst)
}
