//! `qstages` command-line tool.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

mod output;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use qstages::cosmo::{Scenario, ScenarioConfig};
use qstages::factorize::{finest_factorization, DEFAULT_EPS};
use qstages::jw::{verify_car, MAX_MODES};
use qstages::{Error, StateVector64};

/// Tolerance for `jw` to report success.
const CAR_TOLERANCE: f64 = 1e-12;

#[derive(Parser)]
#[command(name = "qstages", version, about = "Discrete-stage quantum universe simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write metrics, trajectory, factor lattice and manifest.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides params.eps.
        #[arg(long)]
        eps: Option<f64>,
        /// Overrides num_qubits.
        #[arg(long)]
        qubits: Option<usize>,
    },
    /// Print the finest tensor factorization of a state file as JSON.
    Factor {
        state: PathBuf,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
    },
    /// Check the anticommutation relations of Jordan-Wigner ladder operators.
    Jw {
        #[arg(long)]
        qubits: usize,
    },
}

/// Failure split by exit code.
enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Self::Usage(_) => 2,
            Self::Runtime(_) => 1,
        }
    }
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

fn runtime(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Runtime(e.into())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("QSTAGES_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            out,
            seed,
            eps,
            qubits,
        } => cmd_run(config, out, seed, eps, qubits),
        Command::Factor { state, eps } => cmd_factor(state, eps),
        Command::Jw { qubits } => cmd_jw(qubits),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            let (Failure::Usage(e) | Failure::Runtime(e)) = &failure;
            eprintln!("error: {e:#}");
            ExitCode::from(failure.code())
        }
    }
}

fn cmd_run(
    config_path: PathBuf,
    out: PathBuf,
    seed: Option<u64>,
    eps: Option<f64>,
    qubits: Option<usize>,
) -> Result<u8, Failure> {
    let text = fs::read_to_string(&config_path)
        .with_context(|| format!("reading {}", config_path.display()))
        .map_err(usage)?;
    let mut config: ScenarioConfig = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", config_path.display()))
        .map_err(usage)?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    if let Some(eps) = eps {
        config.params.eps = Some(eps);
    }
    if let Some(n) = qubits {
        config.num_qubits = n;
    }
    config.validate().context("invalid config").map_err(usage)?;
    let scenario = Scenario::<f64>::new(config).map_err(usage)?;

    fs::create_dir_all(&out)
        .with_context(|| format!("creating {}", out.display()))
        .map_err(runtime)?;
    let started = chrono::Utc::now();
    let run = scenario.run().map_err(runtime)?;
    output::write_run(&run, &config_path, &out, started).map_err(runtime)?;
    Ok(0)
}

fn cmd_factor(path: PathBuf, eps: f64) -> Result<u8, Failure> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(usage(anyhow!("eps must lie in (0, 1), got {eps}")));
    }
    let text = fs::read_to_string(&path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(usage)?;
    let state = StateVector64::from_json(&text)
        .with_context(|| format!("loading state from {}", path.display()))
        .map_err(usage)?;
    let partition = finest_factorization(&state, eps).map_err(runtime)?;
    let export = partition.to_export();
    println!("{}", serde_json::to_string(&export).map_err(runtime)?);
    Ok(0)
}

fn cmd_jw(qubits: usize) -> Result<u8, Failure> {
    let report = match verify_car::<f64>(qubits) {
        Ok(r) => r,
        Err(Error::QubitCount(n)) => {
            return Err(usage(anyhow!("--qubits must lie in 2..={MAX_MODES}, got {n}")));
        }
        Err(e) => return Err(runtime(e)),
    };
    println!("{}", serde_json::to_string_pretty(&report).map_err(runtime)?);
    let ok = report.max_deviation_delta <= CAR_TOLERANCE && report.max_deviation_zero <= CAR_TOLERANCE;
    Ok(if ok { 0 } else { 1 })
}
