use super::engine::Stage;
use super::info::{InformationContent, RetentionPolicy};
use super::test_spec::TestSpec;
use crate::error::Result;
use crate::qstate::{HermitianOperator, QubitSet};
use crate::random::{rule_rng, scrambling_basis};
use crate::scalar::Real;

/// Deterministic test-selection rule.
///
/// `select_test` must be a pure function of the stage: any randomness is
/// drawn from a generator seeded by the rule's own parameters and the stage
/// time (see [`crate::random::rule_rng`]).
pub trait Rule<T: Real>: Send + Sync {
    /// Identifier of the rule as registered; stages start with it.
    fn id(&self) -> &str;

    fn select_test(&self, stage: &Stage<T>) -> Result<TestSpec<T>>;

    fn retention(&self) -> RetentionPolicy {
        RetentionPolicy::Full
    }

    /// Rule identifier active at `next_n`, given the updated memory.
    fn successor(&self, next_n: u64, info: &InformationContent, current: &str) -> String {
        let _ = (next_n, info);
        current.to_owned()
    }

    /// Groups to declare mutually isolated before selecting the test for
    /// this stage.
    fn unlink_groups(&self, stage: &Stage<T>) -> Option<Vec<QubitSet>> {
        let _ = stage;
        None
    }
}

/// Operator with the given orthonormal eigenbasis and eigenvalues
/// `0, 1, 2, …` in basis order.
pub fn labelled_basis_operator<T: Real>(basis: Vec<Vec<crate::scalar::C<T>>>) -> Result<HermitianOperator<T>> {
    let values = (0..basis.len()).map(|k| T::lit(k as f64)).collect();
    HermitianOperator::from_spectrum(values, basis)
}

fn frozen_block<T: Real>(frozen: &Option<QubitSet>) -> Option<(QubitSet, HermitianOperator<T>)> {
    frozen
        .as_ref()
        .filter(|f| !f.is_empty())
        .map(|f| (f.clone(), HermitianOperator::identity(1 << f.len())))
}

/// Pauli Z on every qubit; optionally leaves a set of qubits untouched.
#[derive(Clone, Debug, Default)]
pub struct FixedZRule {
    frozen: Option<QubitSet>,
}

impl FixedZRule {
    pub fn new() -> Self {
        Self::default()
    }

    /// Identity on `frozen`, Z elsewhere.
    pub fn with_frozen(frozen: QubitSet) -> Self {
        Self { frozen: Some(frozen) }
    }
}

impl<T: Real> Rule<T> for FixedZRule {
    fn id(&self) -> &str {
        "fixed-z"
    }

    fn select_test(&self, stage: &Stage<T>) -> Result<TestSpec<T>> {
        let n = stage.state.num_qubits();
        let z = HermitianOperator::pauli_z();
        let mut blocks: Vec<_> = (0..n)
            .filter(|q| !self.frozen.as_ref().is_some_and(|f| f.contains(*q)))
            .map(|q| (QubitSet::single(q), z.clone()))
            .collect();
        blocks.extend(frozen_block(&self.frozen));
        TestSpec::new(n, blocks)
    }
}

/// Independent random single-qubit observables (GUE draws) on every qubit,
/// redrawn at each time step.
#[derive(Clone, Debug)]
pub struct RandomLocalRule {
    seed: u64,
    frozen: Option<QubitSet>,
}

impl RandomLocalRule {
    pub fn new(seed: u64) -> Self {
        Self { seed, frozen: None }
    }

    pub fn with_frozen(seed: u64, frozen: QubitSet) -> Self {
        Self {
            seed,
            frozen: Some(frozen),
        }
    }
}

impl<T: Real> Rule<T> for RandomLocalRule {
    fn id(&self) -> &str {
        "random-local"
    }

    fn select_test(&self, stage: &Stage<T>) -> Result<TestSpec<T>> {
        let n = stage.state.num_qubits();
        let mut rng = rule_rng(self.seed, stage.n);
        let mut blocks = Vec::with_capacity(n);
        for q in 0..n {
            if self.frozen.as_ref().is_some_and(|f| f.contains(q)) {
                continue;
            }
            let op = HermitianOperator::new(crate::random::gue(2, &mut rng))?;
            blocks.push((QubitSet::single(q), op));
        }
        blocks.extend(frozen_block(&self.frozen));
        TestSpec::new(n, blocks)
    }
}

/// Nondegenerate test on each group of qubits with a freshly drawn
/// Haar-like eigenbasis per time step. With a single group spanning the
/// register this is the fully entangling rule: every outcome is a generic
/// entangled state of the whole register.
#[derive(Clone, Debug)]
pub struct ScrambleRule {
    id: String,
    seed: u64,
    groups: Option<Vec<QubitSet>>,
}

impl ScrambleRule {
    /// One group spanning the whole register.
    pub fn entangling(seed: u64) -> Self {
        Self {
            id: "random-entangling".into(),
            seed,
            groups: None,
        }
    }

    /// One test block per group; groups must partition the register.
    pub fn grouped(seed: u64, groups: Vec<QubitSet>) -> Self {
        Self {
            id: "group-scramble".into(),
            seed,
            groups: Some(groups),
        }
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }
}

impl<T: Real> Rule<T> for ScrambleRule {
    fn id(&self) -> &str {
        &self.id
    }

    fn select_test(&self, stage: &Stage<T>) -> Result<TestSpec<T>> {
        let n = stage.state.num_qubits();
        let groups = self.groups.clone().unwrap_or_else(|| vec![QubitSet::full(n)]);
        scramble_test(n, &groups, &mut rule_rng(self.seed, stage.n))
    }
}

/// Test with an independent Haar-like nondegenerate operator on each group.
pub fn scramble_test<T: Real, R: rand::Rng + ?Sized>(
    num_qubits: usize,
    groups: &[QubitSet],
    rng: &mut R,
) -> Result<TestSpec<T>> {
    let mut blocks = Vec::with_capacity(groups.len());
    for g in groups {
        let basis = scrambling_basis(g.len(), rng);
        blocks.push((g.clone(), labelled_basis_operator(basis)?));
    }
    TestSpec::new(num_qubits, blocks)
}
