use rand::Rng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::info::{update_information, InformationContent, OutcomeRecord};
use super::rule::Rule;
use super::test_spec::{sample_outcome, Outcome, TestSpec};
use crate::error::{Error, Result};
use crate::factorize::{classicity_of, finest_factorization, FactorPartition};
use crate::qstate::{inner_product, single_qubit_entropies, QubitSet, StateVector};
use crate::random::{stream_rng, STREAM_SAMPLING};
use crate::scalar::Real;

/// One stage of the evolution: state, in-model memory and active rule.
#[derive(Clone, Debug, PartialEq)]
pub struct Stage<T: Real> {
    pub n: u64,
    pub state: StateVector<T>,
    pub info: InformationContent,
    pub rule_id: String,
}

impl<T: Real> Stage<T> {
    /// Stage at time 0 with empty memory.
    pub fn new(state: StateVector<T>, rule_id: impl Into<String>) -> Self {
        Self {
            n: 0,
            state,
            info: InformationContent::new(),
            rule_id: rule_id.into(),
        }
    }

    /// Stage at time 0 whose memory already holds the finest partition of
    /// `state`, so the first jump produces ancestry edges.
    pub fn with_initial_partition(state: StateVector<T>, rule_id: impl Into<String>, eps: T) -> Result<Self> {
        let partition = finest_factorization(&state, eps)?;
        Ok(Self {
            n: 0,
            state,
            info: InformationContent::with_initial_partition(partition.blocks().to_vec()),
            rule_id: rule_id.into(),
        })
    }
}

/// Asks `rule` for the next test and checks it against the stage: it must
/// cover the register, and no block may reach across unlinked groups.
pub fn select_test<T: Real>(stage: &Stage<T>, rule: &dyn Rule<T>) -> Result<TestSpec<T>> {
    let test = rule.select_test(stage)?;
    if test.num_qubits() != stage.state.num_qubits() {
        return Err(Error::InvalidTest(format!(
            "rule {} produced a test on {} qubits for a {}-qubit stage",
            stage.rule_id,
            test.num_qubits(),
            stage.state.num_qubits()
        )));
    }
    let groups = stage.info.unlinked_groups();
    if !groups.is_empty() {
        for block in test.blocks() {
            if !groups.iter().any(|g| block.qubits.is_subset(g)) {
                return Err(Error::SpansUnlinkedGroups {
                    block: block.qubits.indices().to_vec(),
                });
            }
        }
    }
    Ok(test)
}

/// Everything produced by one jump.
#[derive(Clone, Debug)]
pub struct JumpReport<T: Real> {
    pub stage: Stage<T>,
    pub test: TestSpec<T>,
    pub outcome: Outcome<T>,
    pub partition: FactorPartition<T>,
}

/// Advances `stage` by one jump, drawing a single uniform from `rng`.
pub fn jump<T: Real>(stage: &Stage<T>, rule: &dyn Rule<T>, rng: &mut ChaCha20Rng, eps: T) -> Result<Stage<T>> {
    jump_detailed(stage, rule, rng, eps).map(|r| r.stage)
}

pub fn jump_detailed<T: Real>(
    stage: &Stage<T>,
    rule: &dyn Rule<T>,
    rng: &mut ChaCha20Rng,
    eps: T,
) -> Result<JumpReport<T>> {
    if stage.info.latest_time() != stage.n {
        return Err(Error::TimeMismatch {
            expected: stage.n,
            found: stage.info.latest_time(),
        });
    }
    let linked;
    let stage = if rule.unlink_groups(stage).is_some() {
        let mut s = stage.clone();
        apply_unlink(&mut s, rule, None, eps)?;
        linked = s;
        &linked
    } else {
        stage
    };

    let test = select_test(stage, rule)?;
    let u: f64 = rng.random();
    let (outcome, state) = sample_outcome(&stage.state, &test, u)?;
    let partition = finest_factorization(&state, eps)?;
    let next_n = stage.n + 1;
    let record = OutcomeRecord {
        n: next_n,
        eigenvalues: outcome.eigenvalues.iter().map(|x| x.as_f64()).collect(),
        outcome_index: outcome.indices.clone(),
        probability_at_jump: outcome.probability.as_f64(),
    };
    let info = update_information(&stage.info, record, &partition, rule.retention())?;
    let rule_id = rule.successor(next_n, &info, &stage.rule_id);
    let mut next = Stage {
        n: next_n,
        state,
        info,
        rule_id,
    };
    apply_unlink(&mut next, rule, Some(partition.blocks()), eps)?;
    Ok(JumpReport {
        stage: next,
        test,
        outcome,
        partition,
    })
}

/// Records the unlink the rule requests for `stage`, if any. `blocks` is the
/// finest partition of the stage's state when already known.
pub fn apply_unlink<T: Real>(
    stage: &mut Stage<T>,
    rule: &dyn Rule<T>,
    blocks: Option<&[QubitSet]>,
    eps: T,
) -> Result<()> {
    let Some(groups) = rule.unlink_groups(stage) else {
        return Ok(());
    };
    let current = match blocks {
        Some(b) => b.to_vec(),
        None => finest_factorization(&stage.state, eps)?.blocks().to_vec(),
    };
    stage.info.unlink(groups, &current)
}

/// `|⟨next|prev⟩|²`.
pub fn transition_probability<T: Real>(prev: &StateVector<T>, next: &StateVector<T>) -> Result<T> {
    Ok(inner_product(next, prev)?.norm_sqr())
}

/// Analyst-side record of one stage. Kept outside the model's memory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepSummary {
    pub n: u64,
    pub num_factors: usize,
    /// `None` for a single-qubit register.
    pub kappa: Option<f64>,
    pub outcome_labels: Vec<f64>,
    pub outcome_indices: Vec<usize>,
    /// Born probability of the jump into this stage; 1 for the initial stage.
    pub probability: f64,
    /// Sum of `ln p` over all jumps so far.
    pub path_log_probability: f64,
    pub max_qubit_entropy: f64,
    pub state_digest: String,
    pub near_threshold: bool,
    pub rule_id: String,
}

impl StepSummary {
    fn describe<T: Real>(stage: &Stage<T>, partition: &FactorPartition<T>) -> Result<Self> {
        let n_qubits = stage.state.num_qubits();
        let max_qubit_entropy = single_qubit_entropies(&stage.state)
            .into_iter()
            .map(|s| s.as_f64())
            .fold(0.0, f64::max);
        Ok(Self {
            n: stage.n,
            num_factors: partition.num_blocks(),
            kappa: classicity_of(partition.num_blocks(), n_qubits).ok(),
            outcome_labels: Vec::new(),
            outcome_indices: Vec::new(),
            probability: 1.0,
            path_log_probability: 0.0,
            max_qubit_entropy,
            state_digest: stage.state.digest(),
            near_threshold: partition.near_threshold(),
            rule_id: stage.rule_id.clone(),
        })
    }
}

/// Single-trajectory driver. Holds only the current stage; the summaries it
/// emits are for analysis and never fed back to the rule.
pub struct Engine<'r, T: Real> {
    rule: &'r dyn Rule<T>,
    stage: Stage<T>,
    partition: FactorPartition<T>,
    last_test: Option<TestSpec<T>>,
    rng: ChaCha20Rng,
    eps: T,
    log_probability: f64,
}

impl<'r, T: Real> Engine<'r, T> {
    pub fn new(mut initial: Stage<T>, rule: &'r dyn Rule<T>, seed: u64, eps: T) -> Result<Self> {
        let partition = finest_factorization(&initial.state, eps)?;
        apply_unlink(&mut initial, rule, Some(partition.blocks()), eps)?;
        Ok(Self {
            rule,
            stage: initial,
            partition,
            last_test: None,
            rng: stream_rng(seed, STREAM_SAMPLING),
            eps,
            log_probability: 0.0,
        })
    }

    pub fn stage(&self) -> &Stage<T> {
        &self.stage
    }

    /// Finest partition of the current state.
    pub fn partition(&self) -> &FactorPartition<T> {
        &self.partition
    }

    /// Test that produced the current stage.
    pub fn last_test(&self) -> Option<&TestSpec<T>> {
        self.last_test.as_ref()
    }

    pub fn summary(&self) -> Result<StepSummary> {
        let mut s = StepSummary::describe(&self.stage, &self.partition)?;
        s.path_log_probability = self.log_probability;
        Ok(s)
    }

    pub fn step(&mut self) -> Result<StepSummary> {
        let report = jump_detailed(&self.stage, self.rule, &mut self.rng, self.eps)?;
        let p = report.outcome.probability.as_f64();
        self.log_probability += p.ln();
        self.stage = report.stage;
        self.partition = report.partition;
        self.last_test = Some(report.test);
        let mut s = StepSummary::describe(&self.stage, &self.partition)?;
        s.outcome_labels = report.outcome.eigenvalues.iter().map(|x| x.as_f64()).collect();
        s.outcome_indices = report.outcome.indices;
        s.probability = p;
        s.path_log_probability = self.log_probability;
        log::debug!(
            "n={} factors={} p={:.3e} rule={}",
            s.n,
            s.num_factors,
            s.probability,
            s.rule_id
        );
        Ok(s)
    }

    pub fn into_stage(self) -> Stage<T> {
        self.stage
    }
}

/// Summaries of a completed run plus its final stage.
#[derive(Clone, Debug)]
pub struct Trajectory<T: Real> {
    pub seed: u64,
    pub initial: StepSummary,
    pub steps: Vec<StepSummary>,
    pub final_stage: Stage<T>,
}

/// Runs `steps ≥ 1` jumps from `initial`.
pub fn run<T: Real>(initial: Stage<T>, rule: &dyn Rule<T>, steps: usize, seed: u64, eps: T) -> Result<Trajectory<T>> {
    if steps == 0 {
        return Err(Error::InvalidArgument("a run needs at least one step".into()));
    }
    let mut engine = Engine::new(initial, rule, seed, eps)?;
    let initial = engine.summary()?;
    let mut summaries = Vec::with_capacity(steps);
    for _ in 0..steps {
        summaries.push(engine.step()?);
    }
    Ok(Trajectory {
        seed,
        initial,
        steps: summaries,
        final_stage: engine.into_stage(),
    })
}
