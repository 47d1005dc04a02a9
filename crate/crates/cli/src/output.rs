//! Files written by `qstages run`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use chrono::{DateTime, SecondsFormat, Utc};
use qstages::cosmo::{ScenarioConfig, ScenarioRun};
use qstages::stages::StepSummary;
use serde::Serialize;

pub const METRICS_FILE: &str = "metrics.csv";
pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const DAG_DOT_FILE: &str = "dag.dot";
pub const DAG_JSON_FILE: &str = "dag.json";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Serialize)]
struct TrajectoryRow {
    n: u64,
    #[serde(rename = "N_n")]
    num_factors: usize,
    kappa: Option<f64>,
    outcome_labels: String,
    path_log_probability: f64,
}

impl From<&StepSummary> for TrajectoryRow {
    fn from(s: &StepSummary) -> Self {
        Self {
            n: s.n,
            num_factors: s.num_factors,
            kappa: s.kappa,
            outcome_labels: s
                .outcome_labels
                .iter()
                .map(f64::to_string)
                .collect::<Vec<_>>()
                .join(";"),
            path_log_probability: s.path_log_probability,
        }
    }
}

#[derive(Serialize)]
struct StepDigest<'a> {
    n: u64,
    rule_id: &'a str,
    digest: &'a str,
}

#[derive(Serialize)]
struct InitialStateRef<'a> {
    kind: &'a str,
    digest: &'a str,
}

#[derive(Serialize)]
struct RunManifest<'a> {
    tool: &'static str,
    version: &'static str,
    config_path: String,
    config: &'a ScenarioConfig,
    seed: u64,
    rule_id: &'a str,
    initial_state: InitialStateRef<'a>,
    started_at: String,
    finished_at: String,
    outputs: BTreeMap<&'static str, String>,
    step_digests: Vec<StepDigest<'a>>,
}

fn write_csv<R: Serialize>(path: &Path, rows: impl IntoIterator<Item = R>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn write_run(run: &ScenarioRun<f64>, config_path: &Path, out: &Path, started: DateTime<Utc>) -> Result<()> {
    let traj = &run.trajectory;
    let lattice = run.lattice().context("building the factor lattice")?;

    let outputs: BTreeMap<&'static str, String> = [
        ("metrics", METRICS_FILE),
        ("trajectory", TRAJECTORY_FILE),
        ("dag_dot", DAG_DOT_FILE),
        ("dag_json", DAG_JSON_FILE),
        ("manifest", MANIFEST_FILE),
    ]
    .into_iter()
    .map(|(k, f)| (k, out.join(f).display().to_string()))
    .collect();

    write_csv(&out.join(METRICS_FILE), &run.metrics)?;
    write_csv(
        &out.join(TRAJECTORY_FILE),
        std::iter::once(&traj.initial).chain(&traj.steps).map(TrajectoryRow::from),
    )?;
    write_text(&out.join(DAG_DOT_FILE), &lattice.to_dot())?;
    write_text(&out.join(DAG_JSON_FILE), &lattice.to_json())?;

    let manifest = RunManifest {
        tool: "qstages",
        version: env!("CARGO_PKG_VERSION"),
        config_path: config_path.display().to_string(),
        config: &run.config,
        seed: traj.seed,
        rule_id: &traj.initial.rule_id,
        initial_state: InitialStateRef {
            kind: match run.config.initial() {
                qstages::cosmo::InitialState::Zero => "zero",
                qstages::cosmo::InitialState::Plus => "plus",
                qstages::cosmo::InitialState::Ghz => "ghz",
                qstages::cosmo::InitialState::W => "w",
                qstages::cosmo::InitialState::Random => "random",
            },
            digest: &traj.initial.state_digest,
        },
        started_at: started.to_rfc3339_opts(SecondsFormat::Millis, true),
        finished_at: Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true),
        outputs,
        step_digests: std::iter::once(&traj.initial)
            .chain(&traj.steps)
            .map(|s| StepDigest {
                n: s.n,
                rule_id: &s.rule_id,
                digest: &s.state_digest,
            })
            .collect(),
    };
    write_text(&out.join(MANIFEST_FILE), &serde_json::to_string_pretty(&manifest)?)?;
    log::info!("wrote {} steps to {}", traj.steps.len(), out.display());
    Ok(())
}
