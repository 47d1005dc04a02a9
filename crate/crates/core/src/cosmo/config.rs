use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factorize::DEFAULT_EPS;
use crate::qstate::{check_partition, QubitSet};
use crate::MAX_QUBITS;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    Chaos,
    Genesis,
    Inflation,
    Heatdeath,
    Custom,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Chaos => "chaos",
            Self::Genesis => "genesis",
            Self::Inflation => "inflation",
            Self::Heatdeath => "heatdeath",
            Self::Custom => "custom",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialState {
    /// `|0…0⟩`
    Zero,
    /// `|+⟩^⊗N`
    Plus,
    Ghz,
    W,
    /// Haar-random, drawn from the initial-state stream.
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CustomRule {
    FixedZ,
    RandomLocal,
    RandomEntangling,
    Inflation,
}

/// Optional knobs; each one is only accepted by the scenarios that use it.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialState>,
    /// genesis: first stage governed by the splitting rule.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub onset_step: Option<u64>,
    /// inflation, genesis: split every k-th stage, identity test otherwise.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split_interval: Option<u64>,
    /// heatdeath: stage at which the groups are unlinked.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unlink_step: Option<u64>,
    /// heatdeath: qubit groups; defaults to the two halves of the register.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub groups: Option<Vec<Vec<usize>>>,
    /// custom: which rule to run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<CustomRule>,
    /// custom fixed-z / random-local: qubits given the identity test.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frozen: Option<Vec<usize>>,
    /// Keep only this many recent time slices of memory.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub retain_last: Option<usize>,
}

/// Scenario file: `{"scenario", "num_qubits", "steps", "seed", "params"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub num_qubits: usize,
    pub steps: usize,
    pub seed: u64,
    #[serde(default)]
    pub params: ScenarioParams,
}

impl ScenarioConfig {
    pub fn new(scenario: ScenarioKind, num_qubits: usize, steps: usize, seed: u64) -> Self {
        Self {
            scenario,
            num_qubits,
            steps,
            seed,
            params: ScenarioParams::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn eps(&self) -> f64 {
        self.params.eps.unwrap_or(DEFAULT_EPS)
    }

    pub fn initial(&self) -> InitialState {
        self.params.initial.unwrap_or(InitialState::Random)
    }

    pub fn split_interval(&self) -> u64 {
        self.params.split_interval.unwrap_or(1)
    }

    pub fn onset_step(&self) -> u64 {
        self.params.onset_step.unwrap_or(self.steps as u64 / 2)
    }

    pub fn unlink_step(&self) -> u64 {
        self.params.unlink_step.unwrap_or(self.steps as u64 / 2)
    }

    /// Heat-death groups; the two halves of the register unless configured.
    pub fn groups(&self) -> Result<Vec<QubitSet>> {
        let n = self.num_qubits;
        match &self.params.groups {
            Some(groups) => groups
                .iter()
                .map(|g| QubitSet::new(g.iter().copied(), n))
                .collect(),
            None => Ok(vec![
                QubitSet::new(0..n / 2, n)?,
                QubitSet::new(n / 2..n, n)?,
            ]),
        }
    }

    pub fn frozen(&self) -> Result<Option<QubitSet>> {
        self.params
            .frozen
            .as_ref()
            .map(|f| QubitSet::new(f.iter().copied(), self.num_qubits))
            .transpose()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.num_qubits == 0 || self.num_qubits > MAX_QUBITS {
            return Err(Error::QubitCount(self.num_qubits));
        }
        if self.steps == 0 {
            return bad("steps must be at least 1".into());
        }
        let eps = self.eps();
        if !(eps > 0.0 && eps < 1.0) {
            return bad(format!("eps must lie in (0, 1), got {eps}"));
        }
        if matches!(self.params.retain_last, Some(0 | 1)) {
            return bad("retain_last must be at least 2 so the factor lattice spans a jump".into());
        }
        if self.params.split_interval == Some(0) {
            return bad("split_interval must be at least 1".into());
        }

        let kind = self.scenario;
        let p = &self.params;
        let custom_rule = p.rule;
        let splits = matches!(kind, ScenarioKind::Inflation | ScenarioKind::Genesis)
            || custom_rule == Some(CustomRule::Inflation);
        let allowed = [
            ("onset_step", p.onset_step.is_some(), kind == ScenarioKind::Genesis),
            ("split_interval", p.split_interval.is_some(), splits),
            ("unlink_step", p.unlink_step.is_some(), kind == ScenarioKind::Heatdeath),
            ("groups", p.groups.is_some(), kind == ScenarioKind::Heatdeath),
            ("rule", p.rule.is_some(), kind == ScenarioKind::Custom),
            (
                "frozen",
                p.frozen.is_some(),
                matches!(custom_rule, Some(CustomRule::FixedZ | CustomRule::RandomLocal)),
            ),
        ];
        for (name, given, ok) in allowed {
            if given && !ok {
                return bad(format!("parameter {name} is not used by scenario {}", kind.name()));
            }
        }

        match kind {
            ScenarioKind::Custom if custom_rule.is_none() => {
                return bad("custom scenario needs params.rule".into());
            }
            ScenarioKind::Heatdeath => {
                if self.num_qubits < 2 {
                    return bad("heatdeath needs at least two qubits".into());
                }
                if self.unlink_step() >= self.steps as u64 {
                    return bad(format!(
                        "unlink_step {} must be below steps {}",
                        self.unlink_step(),
                        self.steps
                    ));
                }
                let groups = self.groups()?;
                if groups.len() < 2 {
                    return bad("heatdeath needs at least two groups".into());
                }
                check_partition(&groups, self.num_qubits)?;
            }
            _ => {}
        }
        self.frozen()?;
        Ok(())
    }
}
