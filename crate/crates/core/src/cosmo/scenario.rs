use serde::Serialize;

use super::config::{InitialState, ScenarioConfig, ScenarioKind};
use super::lattice::FactorLattice;
use super::rules::{ScenarioRule, CHAOS};
use crate::error::{Error, Result};
use crate::factorize::{classicity_of, FactorPartition};
use crate::qstate::{mutual_information_matrix, single_qubit_entropies, StateVector};
use crate::random::{stream_rng, STREAM_INITIAL_STATE};
use crate::scalar::{Real, C};
use crate::stages::{Engine, Rule, Stage, StepSummary, Trajectory};

/// One row of the metrics time series.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricsRow {
    pub n: u64,
    #[serde(rename = "N_n")]
    pub num_factors: usize,
    pub kappa: Option<f64>,
    /// Smallest pairwise mutual information over all qubit pairs.
    #[serde(rename = "min_cross_MI")]
    pub min_cross_mi: Option<f64>,
    /// Largest single-qubit entropy, i.e. the strongest entanglement of one
    /// qubit with the rest of its factor block.
    pub max_block_entropy: f64,
    /// Largest pairwise mutual information across unlinked groups; empty
    /// until groups are unlinked.
    #[serde(rename = "max_cross_group_MI")]
    pub max_cross_group_mi: Option<f64>,
}

impl MetricsRow {
    pub fn measure<T: Real>(stage: &Stage<T>, partition: &FactorPartition<T>) -> Result<Self> {
        let s = &stage.state;
        let n = s.num_qubits();
        let mi = mutual_information_matrix(s);
        let mut min_mi: Option<f64> = None;
        let mut cross_group: Option<f64> = None;
        let groups = stage.info.unlinked_groups();
        for i in 0..n {
            for j in (i + 1)..n {
                let v = mi[i][j].as_f64();
                min_mi = Some(min_mi.map_or(v, |m| m.min(v)));
                if !groups.is_empty() && stage.info.group_of(i) != stage.info.group_of(j) {
                    cross_group = Some(cross_group.map_or(v, |m| m.max(v)));
                }
            }
        }
        Ok(Self {
            n: stage.n,
            num_factors: partition.num_blocks(),
            kappa: classicity_of(partition.num_blocks(), n).ok(),
            min_cross_mi: min_mi,
            max_block_entropy: single_qubit_entropies(s).into_iter().map(|x| x.as_f64()).fold(0.0, f64::max),
            max_cross_group_mi: cross_group,
        })
    }
}

/// Prepares the configured initial state from the initial-state stream.
pub fn initial_state<T: Real>(config: &ScenarioConfig) -> Result<StateVector<T>> {
    let n = config.num_qubits;
    match config.initial() {
        InitialState::Zero => StateVector::zero(n),
        InitialState::Plus => StateVector::normalized(n, vec![C::new(T::one(), T::zero()); 1 << n]),
        InitialState::Ghz => StateVector::ghz(n),
        InitialState::W => StateVector::w(n),
        InitialState::Random => StateVector::haar_random(n, &mut stream_rng(config.seed, STREAM_INITIAL_STATE)),
    }
}

/// A configured scenario: validated config, its rule and initial stage.
#[derive(Clone, Debug)]
pub struct Scenario<T: Real> {
    config: ScenarioConfig,
    rule: ScenarioRule<T>,
}

/// Output of a scenario run.
#[derive(Clone, Debug)]
pub struct ScenarioRun<T: Real> {
    pub config: ScenarioConfig,
    pub trajectory: Trajectory<T>,
    pub metrics: Vec<MetricsRow>,
}

impl<T: Real> ScenarioRun<T> {
    /// Factor lattice of the retained memory of the final stage.
    pub fn lattice(&self) -> Result<FactorLattice> {
        FactorLattice::from_info(&self.trajectory.final_stage.info)
    }
}

impl<T: Real> Scenario<T> {
    pub fn new(config: ScenarioConfig) -> Result<Self> {
        let rule = ScenarioRule::from_config(&config)?;
        Ok(Self { config, rule })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn rule(&self) -> &ScenarioRule<T> {
        &self.rule
    }

    /// Configured tolerance, raised to the precision floor of `T`.
    pub fn eps(&self) -> T {
        T::lit(self.config.eps()).max(crate::factorize::precision_floor())
    }

    pub fn initial_stage(&self) -> Result<Stage<T>> {
        Stage::with_initial_partition(initial_state(&self.config)?, self.rule.id(), self.eps())
    }

    pub fn run(&self) -> Result<ScenarioRun<T>> {
        self.run_with(|_, _| Ok(()))
    }

    /// Runs the scenario, calling `observe` after every jump with the engine
    /// positioned on the new stage.
    pub fn run_with<F>(&self, mut observe: F) -> Result<ScenarioRun<T>>
    where
        F: FnMut(&Engine<'_, T>, &StepSummary) -> Result<()>,
    {
        let mut engine = Engine::new(self.initial_stage()?, &self.rule, self.config.seed, self.eps())?;
        let initial = engine.summary()?;
        let mut metrics = vec![MetricsRow::measure(engine.stage(), engine.partition())?];
        let mut steps = Vec::with_capacity(self.config.steps);
        for _ in 0..self.config.steps {
            let rule_before = engine.stage().rule_id.clone();
            let summary = engine.step()?;
            if rule_before == CHAOS && summary.num_factors > 1 {
                // Generic entangling tests factorize the register with
                // probability zero; report it instead of hiding it.
                log::warn!(
                    "chaos jump into n={} produced {} factors (near threshold: {})",
                    summary.n,
                    summary.num_factors,
                    summary.near_threshold
                );
            }
            metrics.push(MetricsRow::measure(engine.stage(), engine.partition())?);
            observe(&engine, &summary)?;
            steps.push(summary);
        }
        Ok(ScenarioRun {
            config: self.config.clone(),
            trajectory: Trajectory {
                seed: self.config.seed,
                initial,
                steps,
                final_stage: engine.into_stage(),
            },
            metrics,
        })
    }
}

/// Runs `config` with its scenario as given.
pub fn run_scenario<T: Real>(config: &ScenarioConfig) -> Result<ScenarioRun<T>> {
    Scenario::new(config.clone())?.run()
}

fn run_as<T: Real>(config: &ScenarioConfig, kind: ScenarioKind) -> Result<ScenarioRun<T>> {
    if config.scenario != kind {
        return Err(Error::InvalidArgument(format!(
            "config is for scenario {}, not {}",
            config.scenario.name(),
            kind.name()
        )));
    }
    run_scenario(config)
}

pub fn scenario_chaos<T: Real>(config: &ScenarioConfig) -> Result<ScenarioRun<T>> {
    run_as(config, ScenarioKind::Chaos)
}

pub fn scenario_inflation<T: Real>(config: &ScenarioConfig) -> Result<ScenarioRun<T>> {
    run_as(config, ScenarioKind::Inflation)
}

pub fn scenario_heatdeath<T: Real>(config: &ScenarioConfig) -> Result<ScenarioRun<T>> {
    run_as(config, ScenarioKind::Heatdeath)
}

pub fn scenario_genesis<T: Real>(config: &ScenarioConfig) -> Result<ScenarioRun<T>> {
    run_as(config, ScenarioKind::Genesis)
}
