//! Acceptance suite: one line per criterion, nonzero exit on any failure.
//!
//! Run with `cargo test -p qstages --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use qstages::cosmo::{run_scenario, CustomRule, ScenarioConfig, ScenarioKind};
use qstages::factorize::{brute_force_factorization, classicity_of, finest_factorization, DEFAULT_EPS};
use qstages::jw::verify_car;
use qstages::linalg::CMatrix;
use qstages::random::stream_rng;
use qstages::stages::{
    jump, outcome_distribution, select_test, Engine, FixedZRule, Rule, ScrambleRule, Stage, TestSpec,
};
use qstages::{Error, HermitianOperator64, QubitSet, StateVector64};
use rand::Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

struct Criterion {
    id: &'static str,
    name: &'static str,
    budget: Duration,
    check: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: "AC1", name: "born-rule statistics", budget: Duration::from_secs(5), check: born_rule },
        Criterion { id: "AC2", name: "normalization conservation", budget: Duration::from_secs(30), check: normalization },
        Criterion { id: "AC3", name: "factorization oracle equivalence", budget: Duration::from_secs(60), check: oracle_equivalence },
        Criterion { id: "AC4", name: "classicity bounds", budget: Duration::from_secs(1), check: classicity_bounds },
        Criterion { id: "AC5", name: "CAR verification", budget: Duration::from_secs(60), check: car },
        Criterion { id: "AC6", name: "inflation scenario", budget: Duration::from_secs(10), check: inflation },
        Criterion { id: "AC7", name: "heat-death permanence", budget: Duration::from_secs(10), check: heat_death },
        Criterion { id: "AC8", name: "causal DAG", budget: Duration::from_secs(5), check: causal_dag },
        Criterion { id: "AC9", name: "irreversibility witness", budget: Duration::from_secs(1), check: irreversibility },
        Criterion { id: "AC10", name: "measure-zero factorizability", budget: Duration::from_secs(30), check: measure_zero },
    ];
    let mut failures = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(c.check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let result = match result {
            Ok(detail) if elapsed > c.budget => Err(format!("{detail}; exceeded {:?} budget", c.budget)),
            other => other,
        };
        let (tag, detail) = match &result {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("[{tag}] {} {} ({:.2} s): {detail}", c.id, c.name, elapsed.as_secs_f64());
        failures += result.is_err() as usize;
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn z_projector(bit: usize) -> CMatrix<f64> {
    let mut p = CMatrix::zeros(2);
    p[(bit, bit)] = Complex64::new(1.0, 0.0);
    p
}

fn born_rule() -> Outcome {
    let ghz = StateVector64::ghz(3).map_err(|e| e.to_string())?;
    let test = TestSpec::per_qubit(3, &HermitianOperator64::pauli_z()).map_err(|e| e.to_string())?;
    let dist = outcome_distribution(&ghz, &test).map_err(|e| e.to_string())?;

    // Oracle: ⟨ψ|P_a ⊗ P_b ⊗ P_c|ψ⟩ over all eight Z projector products.
    let mut oracle = Vec::new();
    for x in 0..8usize {
        let p = z_projector(x >> 2 & 1).kron(&z_projector(x >> 1 & 1)).kron(&z_projector(x & 1));
        let pv = p.mul_vec(ghz.amplitudes()).map_err(|e| e.to_string())?;
        let prob: f64 = ghz.amplitudes().iter().zip(&pv).map(|(a, b)| (a.conj() * b).re).sum();
        let labels: Vec<f64> = [x >> 2 & 1, x >> 1 & 1, x & 1].iter().map(|&b| if b == 0 { 1.0 } else { -1.0 }).collect();
        oracle.push((labels, prob));
    }
    let nonzero: Vec<_> = oracle.iter().filter(|(_, p)| *p > 1e-15).collect();
    ensure!(dist.len() == 2 && nonzero.len() == 2, "expected two outcomes, got {}", dist.len());
    for o in &dist {
        let want = oracle.iter().find(|(l, _)| *l == o.eigenvalues).map(|(_, p)| *p);
        ensure!(want.is_some_and(|w| (w - o.probability).abs() <= 1e-9), "outcome {:?} disagrees with oracle", o.eigenvalues);
        ensure!((o.probability - 0.5).abs() <= 1e-9, "probability {} not 0.5", o.probability);
    }

    let stage = Stage::new(ghz, "fixed-z");
    let rule = FixedZRule::new();
    let mut rng = stream_rng(2024, 1);
    let trials = 100_000;
    let mut all_zero = 0usize;
    let zeros = StateVector64::zero(3).map_err(|e| e.to_string())?;
    for _ in 0..trials {
        let next = jump(&stage, &rule, &mut rng, DEFAULT_EPS).map_err(|e| e.to_string())?;
        if next.state.approx_eq_up_to_phase(&zeros, 1e-12) {
            all_zero += 1;
        }
    }
    let f = all_zero as f64 / trials as f64;
    ensure!((0.494..=0.506).contains(&f), "frequency of |000⟩ is {f}");
    Ok(format!("2 outcomes at 0.5 match the projector oracle; |000⟩ frequency {f:.4} over {trials} jumps"))
}

fn normalization() -> Outcome {
    let rule = ScrambleRule::entangling(8);
    let initial = Stage::new(StateVector64::zero(8).map_err(|e| e.to_string())?, Rule::<f64>::id(&rule));
    let mut engine = Engine::new(initial, &rule, 8, DEFAULT_EPS).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        engine.step().map_err(|e| e.to_string())?;
        worst = worst.max((engine.stage().state.norm() - 1.0).abs());
    }
    ensure!(worst <= 1e-9, "max |norm - 1| = {worst:e}");
    Ok(format!("max |‖Ψ‖ − 1| = {worst:.1e} over 1000 steps"))
}

fn random_state(i: usize, rng: &mut impl Rng) -> StateVector64 {
    let n = 2 + i % 5;
    if i % 2 == 1 {
        return StateVector64::haar_random(n, rng).unwrap();
    }
    let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
    let mut factors = Vec::new();
    for l in 0..n {
        let qubits: Vec<usize> = (0..n).filter(|&q| labels[q] == l).collect();
        if qubits.is_empty() {
            continue;
        }
        let block = StateVector64::haar_random(qubits.len(), rng).unwrap();
        factors.push((QubitSet::new(qubits, n).unwrap(), block));
    }
    StateVector64::from_factors(n, &factors).unwrap()
}

fn oracle_equivalence() -> Outcome {
    let mut rng = stream_rng(500, 0);
    let mut multi = 0;
    for i in 0..500 {
        let s = random_state(i, &mut rng);
        let fast = finest_factorization(&s, DEFAULT_EPS).map_err(|e| e.to_string())?;
        let slow = brute_force_factorization(&s, DEFAULT_EPS).map_err(|e| e.to_string())?;
        ensure!(fast.blocks() == slow.blocks(), "state {i}: {:?} vs {:?}", fast.blocks(), slow.blocks());
        multi += (fast.num_blocks() > 1) as usize;
    }
    Ok(format!("500/500 agree ({multi} with several blocks)"))
}

fn classicity_bounds() -> Outcome {
    let mut checked = 0;
    for n in 2..=20 {
        let mut prev = -1.0;
        for k in 1..=n {
            let kappa = classicity_of(k, n).map_err(|e| e.to_string())?;
            ensure!((0.0..=1.0).contains(&kappa), "κ({k},{n}) = {kappa}");
            ensure!((kappa == 0.0) == (k == 1), "κ = 0 iff one block fails at ({k},{n})");
            ensure!((kappa == 1.0) == (k == n), "κ = 1 iff N blocks fails at ({k},{n})");
            ensure!(kappa > prev, "κ not strictly increasing at ({k},{n})");
            prev = kappa;
            checked += 1;
        }
    }
    ensure!(classicity_of(1, 1) == Err(Error::ClassicityUndefined), "N = 1 must be undefined");
    Ok(format!("{checked} (N_n, N) pairs"))
}

fn car() -> Outcome {
    let r = verify_car::<f64>(8).map_err(|e| e.to_string())?;
    ensure!(
        r.max_deviation_delta <= 1e-12 && r.max_deviation_zero <= 1e-12,
        "deviations {:e}, {:e}",
        r.max_deviation_delta,
        r.max_deviation_zero
    );
    Ok(format!(
        "max deviations {:.1e} (delta), {:.1e} (zero) over 64 pairs",
        r.max_deviation_delta, r.max_deviation_zero
    ))
}

fn inflation() -> Outcome {
    let config = ScenarioConfig::new(ScenarioKind::Inflation, 16, 6, 7);
    let run = run_scenario::<f64>(&config).map_err(|e| e.to_string())?;
    let counts: Vec<usize> = run.metrics.iter().map(|m| m.num_factors).collect();
    ensure!(counts == [1, 2, 4, 8, 16, 16, 16], "N_n = {counts:?}");
    let kappa = run.metrics.last().and_then(|m| m.kappa);
    ensure!(kappa == Some(1.0), "final κ = {kappa:?}");
    ensure!(
        run.metrics.windows(2).all(|w| w[0].kappa <= w[1].kappa),
        "κ not nondecreasing"
    );
    Ok(format!("N_n = {counts:?}, final κ = 1"))
}

fn heat_death() -> Outcome {
    let mut config = ScenarioConfig::new(ScenarioKind::Heatdeath, 6, 70, 11);
    config.params.unlink_step = Some(10);
    config.params.groups = Some(vec![vec![0, 1, 2], vec![3, 4, 5]]);
    let run = run_scenario::<f64>(&config).map_err(|e| e.to_string())?;
    let after: Vec<_> = run.metrics.iter().filter(|m| m.n > 10).collect();
    ensure!(after.len() >= 50, "only {} steps after unlinking", after.len());
    let worst = run
        .metrics
        .iter()
        .filter(|m| m.n >= 10)
        .map(|m| m.max_cross_group_mi.ok_or(format!("no groups recorded at n = {}", m.n)))
        .try_fold(0.0f64, |acc, v| v.map(|v| acc.max(v)))?;
    ensure!(worst <= 1e-9, "cross-group MI reached {worst:e}");
    let inner = after.iter().map(|m| m.max_block_entropy).fold(0.0, f64::max);

    let stage = &run.trajectory.final_stage;
    let err = select_test(stage, &ScrambleRule::entangling(1)).err();
    ensure!(
        matches!(err, Some(Error::SpansUnlinkedGroups { .. })),
        "spanning test not rejected: {err:?}"
    );
    let err = jump(stage, &ScrambleRule::entangling(1), &mut stream_rng(1, 1), DEFAULT_EPS).err();
    ensure!(matches!(err, Some(Error::SpansUnlinkedGroups { .. })), "jump accepted a spanning test");
    Ok(format!(
        "max cross-group MI {worst:.1e} over {} later steps; within-group entropy up to {inner:.2}; spanning test rejected",
        after.len()
    ))
}

/// Independent recount: parent/child pairs between consecutive snapshots
/// whose qubit masks overlap.
fn recount_edges(partitions: &[qstages::stages::PartitionSnapshot]) -> usize {
    partitions
        .windows(2)
        .map(|w| {
            let masks = |p: &qstages::stages::PartitionSnapshot| -> Vec<u64> {
                p.blocks.iter().map(|b| b.iter().fold(0u64, |m, q| m | 1 << q)).collect()
            };
            let (a, b) = (masks(&w[0]), masks(&w[1]));
            a.iter().map(|x| b.iter().filter(|y| *x & **y != 0).count()).sum::<usize>()
        })
        .sum()
}

fn causal_dag() -> Outcome {
    let mut configs = vec![
        ScenarioConfig::new(ScenarioKind::Chaos, 4, 10, 1),
        ScenarioConfig::new(ScenarioKind::Inflation, 8, 5, 2),
        ScenarioConfig::new(ScenarioKind::Genesis, 6, 8, 3),
        ScenarioConfig::new(ScenarioKind::Heatdeath, 6, 12, 4),
        ScenarioConfig::new(ScenarioKind::Custom, 5, 6, 5),
    ];
    configs[4].params.rule = Some(CustomRule::RandomLocal);
    let mut total_edges = 0;
    for config in &configs {
        let run = run_scenario::<f64>(config).map_err(|e| e.to_string())?;
        let lattice = run.lattice().map_err(|e| format!("{}: {e}", config.scenario.name()))?;
        lattice.check_acyclic().map_err(|e| e.to_string())?;
        for &(p, c) in lattice.edges() {
            ensure!(
                lattice.nodes()[c].time == lattice.nodes()[p].time + 1,
                "{}: edge not between consecutive times",
                config.scenario.name()
            );
        }
        let expected = recount_edges(run.trajectory.final_stage.info.partitions());
        ensure!(
            lattice.edges().len() == expected,
            "{}: {} edges, recount {expected}",
            config.scenario.name(),
            lattice.edges().len()
        );
        total_edges += expected;
    }
    Ok(format!("5 scenarios acyclic, {total_edges} edges match the recount"))
}

fn irreversibility() -> Outcome {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = StateVector64::plus();
    let plus_i = StateVector64::new(1, vec![Complex64::new(h, 0.0), Complex64::new(0.0, h)]).map_err(|e| e.to_string())?;
    ensure!(plus.fidelity(&plus_i) < 1.0 - 1e-6, "predecessors are not distinct");
    let rule = FixedZRule::new();
    let a = jump(&Stage::new(plus, "fixed-z"), &rule, &mut stream_rng(9, 1), DEFAULT_EPS).map_err(|e| e.to_string())?;
    let b = jump(&Stage::new(plus_i, "fixed-z"), &rule, &mut stream_rng(9, 1), DEFAULT_EPS).map_err(|e| e.to_string())?;
    let (ra, rb) = (&a.info.records()[0], &b.info.records()[0]);
    ensure!(ra.outcome_index == rb.outcome_index, "outcomes differ");
    ensure!(a.state.approx_eq_up_to_phase(&b.state, 1e-12), "successors differ");
    Ok(format!(
        "|+⟩ and (|0⟩+i|1⟩)/√2 both jump to the λ = {} eigenstate under seed 9",
        ra.eigenvalues[0]
    ))
}

fn measure_zero() -> Outcome {
    let mut rng = stream_rng(1000, 0);
    for i in 0..1000 {
        let s = StateVector64::haar_random(4, &mut rng).map_err(|e| e.to_string())?;
        let p = finest_factorization(&s, DEFAULT_EPS).map_err(|e| e.to_string())?;
        ensure!(p.num_blocks() == 1, "state {i} split into {:?}", p.blocks());
    }
    Ok("1000/1000 Haar 4-qubit states are a single block".into())
}
