use super::config::{CustomRule, ScenarioConfig, ScenarioKind};
use crate::error::{Error, Result};
use crate::factorize::finest_factorization;
use crate::linalg::eigh;
use crate::qstate::{reduced_matrix, HermitianOperator, QubitSet};
use crate::random::{rule_rng, scrambling_basis};
use crate::scalar::Real;
use crate::stages::{
    labelled_basis_operator, scramble_test, FixedZRule, InformationContent, RandomLocalRule, RetentionPolicy, Rule,
    Stage, TestSpec,
};

pub const CHAOS: &str = "chaos";
pub const INFLATION: &str = "inflation";
pub const GROUP_SCRAMBLE: &str = "group-scramble";
pub const FIXED_Z: &str = "fixed-z";
pub const RANDOM_LOCAL: &str = "random-local";
pub const RANDOM_ENTANGLING: &str = "random-entangling";

/// Half-blocks up to this size are measured in their exact Schmidt basis;
/// larger ones in a scrambled basis, which splits the block just the same
/// because any rank-one measurement of a subsystem decouples it.
pub const SCHMIDT_EIGH_MAX_QUBITS: usize = 8;

/// Rule of a scripted scenario. The active sub-rule is a function of the
/// stage time and is carried in the stage's `rule_id`.
#[derive(Clone, Debug)]
pub struct ScenarioRule<T: Real> {
    kind: ScenarioKind,
    custom: Option<CustomRule>,
    seed: u64,
    eps: T,
    onset: u64,
    split_interval: u64,
    unlink_step: u64,
    groups: Vec<QubitSet>,
    frozen: Option<QubitSet>,
    retention: RetentionPolicy,
}

impl<T: Real> ScenarioRule<T> {
    pub fn from_config(config: &ScenarioConfig) -> Result<Self> {
        config.validate()?;
        let groups = match config.scenario {
            ScenarioKind::Heatdeath => config.groups()?,
            _ => Vec::new(),
        };
        Ok(Self {
            kind: config.scenario,
            custom: config.params.rule,
            seed: config.seed,
            eps: T::lit(config.eps()).max(crate::factorize::precision_floor()),
            onset: match config.scenario {
                ScenarioKind::Genesis => config.onset_step(),
                _ => 0,
            },
            split_interval: config.split_interval(),
            unlink_step: config.unlink_step(),
            groups,
            frozen: config.frozen()?,
            retention: config
                .params
                .retain_last
                .map_or(RetentionPolicy::Full, RetentionPolicy::KeepLast),
        })
    }

    /// Sub-rule governing the stage at time `n`.
    pub fn rule_at(&self, n: u64) -> &'static str {
        match self.kind {
            ScenarioKind::Chaos => CHAOS,
            ScenarioKind::Inflation => INFLATION,
            ScenarioKind::Genesis if n < self.onset => CHAOS,
            ScenarioKind::Genesis => INFLATION,
            // The stage just before unlinking is already group-local, so the
            // unlinked groups are product with each other when declared.
            ScenarioKind::Heatdeath if n + 1 < self.unlink_step => CHAOS,
            ScenarioKind::Heatdeath => GROUP_SCRAMBLE,
            ScenarioKind::Custom => match self.custom {
                Some(CustomRule::FixedZ) => FIXED_Z,
                Some(CustomRule::RandomLocal) => RANDOM_LOCAL,
                Some(CustomRule::RandomEntangling) => RANDOM_ENTANGLING,
                Some(CustomRule::Inflation) | None => INFLATION,
            },
        }
    }

    pub fn groups(&self) -> &[QubitSet] {
        &self.groups
    }

    fn current_blocks(&self, stage: &Stage<T>) -> Result<Vec<QubitSet>> {
        match stage.info.latest_partition() {
            Some(p) => Ok(p.blocks.clone()),
            None => Ok(finest_factorization(&stage.state, self.eps)?.blocks().to_vec()),
        }
    }

    /// Splits every block of two or more qubits by a nondegenerate test on
    /// its first half (in the half's Schmidt basis), leaving the rest of the
    /// block untouched.
    fn split_test(&self, stage: &Stage<T>) -> Result<TestSpec<T>> {
        let n = stage.state.num_qubits();
        let blocks = self.current_blocks(stage)?;
        let since = stage.n.saturating_sub(self.onset);
        let identity = |b: QubitSet| {
            let dim = 1usize << b.len();
            (b, HermitianOperator::identity(dim))
        };
        if !since.is_multiple_of(self.split_interval) {
            return TestSpec::new(n, blocks.into_iter().map(identity).collect());
        }
        let mut rng = rule_rng(self.seed, stage.n);
        let mut parts = Vec::with_capacity(2 * blocks.len());
        for block in blocks {
            if block.len() < 2 {
                parts.push(identity(block));
                continue;
            }
            let half = QubitSet::new(block.indices()[..block.len() / 2].iter().copied(), n)?;
            let rest = block.difference(&half);
            let basis = if half.len() <= SCHMIDT_EIGH_MAX_QUBITS {
                eigh(&reduced_matrix(stage.state.amplitudes(), half.indices(), n)).eigenvectors
            } else {
                scrambling_basis(half.len(), &mut rng)
            };
            parts.push((half, labelled_basis_operator(basis)?));
            parts.push(identity(rest));
        }
        TestSpec::new(n, parts)
    }
}

impl<T: Real> Rule<T> for ScenarioRule<T> {
    fn id(&self) -> &str {
        self.rule_at(0)
    }

    fn select_test(&self, stage: &Stage<T>) -> Result<TestSpec<T>> {
        let n = stage.state.num_qubits();
        match stage.rule_id.as_str() {
            CHAOS | RANDOM_ENTANGLING => scramble_test(n, &[QubitSet::full(n)], &mut rule_rng(self.seed, stage.n)),
            GROUP_SCRAMBLE => scramble_test(n, &self.groups, &mut rule_rng(self.seed, stage.n)),
            INFLATION => self.split_test(stage),
            FIXED_Z => match &self.frozen {
                Some(f) => FixedZRule::with_frozen(f.clone()).select_test(stage),
                None => FixedZRule::new().select_test(stage),
            },
            RANDOM_LOCAL => match &self.frozen {
                Some(f) => RandomLocalRule::with_frozen(self.seed, f.clone()).select_test(stage),
                None => RandomLocalRule::new(self.seed).select_test(stage),
            },
            other => Err(Error::InvalidArgument(format!("unknown rule {other}"))),
        }
    }

    fn retention(&self) -> RetentionPolicy {
        self.retention
    }

    fn successor(&self, next_n: u64, _info: &InformationContent, _current: &str) -> String {
        self.rule_at(next_n).to_owned()
    }

    fn unlink_groups(&self, stage: &Stage<T>) -> Option<Vec<QubitSet>> {
        (self.kind == ScenarioKind::Heatdeath
            && stage.n == self.unlink_step
            && stage.info.unlinked_groups().is_empty())
        .then(|| self.groups.clone())
    }
}
