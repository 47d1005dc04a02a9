use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn qstages(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qstages"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn run_config(dir: &Path, config: &str, out: &str) -> Output {
    let path = write(dir, "config.json", config);
    let out = dir.join(out).display().to_string();
    qstages(&["run", "--config", &path, "--out", &out])
}

fn column(csv_text: &str, name: &str) -> Vec<String> {
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    let idx = reader.headers().unwrap().iter().position(|h| h == name).unwrap();
    reader.records().map(|r| r.unwrap()[idx].to_string()).collect()
}

#[test]
fn inflation_run_writes_all_outputs() {
    let dir = TempDir::new().unwrap();
    let out = run_config(
        dir.path(),
        r#"{"scenario": "inflation", "num_qubits": 8, "steps": 5, "seed": 7}"#,
        "out",
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let metrics = fs::read_to_string(dir.path().join("out/metrics.csv")).unwrap();
    assert!(metrics.starts_with("n,N_n,kappa,min_cross_MI,max_block_entropy,max_cross_group_MI\n"));
    let n_n: Vec<usize> = column(&metrics, "N_n").iter().map(|x| x.parse().unwrap()).collect();
    assert!(n_n.windows(2).all(|w| w[0] <= w[1]), "{n_n:?}");
    assert_eq!(n_n, vec![1, 2, 4, 8, 8, 8]);

    let trajectory = fs::read_to_string(dir.path().join("out/trajectory.csv")).unwrap();
    assert!(trajectory.starts_with("n,N_n,kappa,outcome_labels,path_log_probability\n"));

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["step_digests"].as_array().unwrap().len(), 6);
    for (_, path) in manifest["outputs"].as_object().unwrap() {
        assert!(Path::new(path.as_str().unwrap()).exists(), "{path}");
    }
    let dag: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/dag.json")).unwrap()).unwrap();
    assert_eq!(dag["adjacency"]["t0b0"], serde_json::json!(["t1b0", "t1b1"]));
    assert!(fs::read_to_string(dir.path().join("out/dag.dot")).unwrap().starts_with("digraph"));
}

#[test]
fn same_seed_gives_identical_csv() {
    let dir = TempDir::new().unwrap();
    let config = r#"{"scenario": "heatdeath", "num_qubits": 4, "steps": 12, "seed": 3, "params": {"unlink_step": 4}}"#;
    assert!(run_config(dir.path(), config, "a").status.success());
    assert!(run_config(dir.path(), config, "b").status.success());
    for file in ["metrics.csv", "trajectory.csv", "dag.dot", "dag.json"] {
        let a = fs::read(dir.path().join("a").join(file)).unwrap();
        let b = fs::read(dir.path().join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file}");
    }
}

#[test]
fn seed_flag_overrides_config() {
    let dir = TempDir::new().unwrap();
    let path = write(dir.path(), "c.json", r#"{"scenario": "chaos", "num_qubits": 3, "steps": 2, "seed": 1}"#);
    let out = dir.path().join("o").display().to_string();
    let status = qstages(&["run", "--config", &path, "--out", &out, "--seed", "99", "--qubits", "4"]);
    assert!(status.status.success());
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("o/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 99);
    assert_eq!(manifest["config"]["num_qubits"], 4);
}

#[test]
fn bad_configs_exit_2() {
    let dir = TempDir::new().unwrap();
    for config in [
        r#"{"scenario": "inflation", "num_qubits": 8"#,
        r#"{"scenario": "inflation", "num_qubits": 8, "steps": 0, "seed": 1}"#,
        r#"{"scenario": "heatdeath", "num_qubits": 8, "steps": 5, "seed": 1, "params": {"unlink_step": 9}}"#,
    ] {
        let out = run_config(dir.path(), config, "out");
        assert_eq!(out.status.code(), Some(2), "{config}");
    }
    let missing = dir.path().join("nope.json").display().to_string();
    assert_eq!(qstages(&["run", "--config", &missing, "--out", "x"]).status.code(), Some(2));
}

#[test]
fn runtime_failure_exits_1() {
    // A Haar-random start is one factor, so unlinking at time 0 fails.
    let dir = TempDir::new().unwrap();
    let out = run_config(
        dir.path(),
        r#"{"scenario": "heatdeath", "num_qubits": 4, "steps": 3, "seed": 1, "params": {"unlink_step": 0}}"#,
        "out",
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn factor_examples() {
    let dir = TempDir::new().unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let cases = [
        (r#"{"num_qubits": 2, "amplitudes": [[1,0],[0,0],[0,0],[0,0]]}"#.to_string(), r#"{"blocks":[[0],[1]],"classicity":1.0}"#),
        (
            format!(r#"{{"num_qubits": 2, "amplitudes": [[{h},0],[0,0],[0,0],[{h},0]]}}"#),
            r#"{"blocks":[[0,1]],"classicity":0.0}"#,
        ),
        (
            format!(r#"{{"num_qubits": 3, "amplitudes": [[{h},0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[{h},0]]}}"#),
            r#"{"blocks":[[0,1,2]],"classicity":0.0}"#,
        ),
    ];
    for (i, (state, want)) in cases.iter().enumerate() {
        let path = write(dir.path(), &format!("s{i}.json"), state);
        let out = qstages(&["factor", &path]);
        assert!(out.status.success());
        assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), *want);
    }
    let path = write(dir.path(), "bad.json", r#"{"num_qubits": 1, "amplitudes": [[1,0],[1,0]]}"#);
    assert_eq!(qstages(&["factor", &path]).status.code(), Some(2));
}

#[test]
fn jw_report_and_range() {
    let out = qstages(&["jw", "--qubits", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["max_deviation_delta"].as_f64().unwrap() >= 0.0);
    assert!(report["max_deviation_zero"].as_f64().unwrap() >= 0.0);
    assert_eq!(qstages(&["jw", "--qubits", "13"]).status.code(), Some(2));
    assert_eq!(qstages(&["jw", "--qubits", "1"]).status.code(), Some(2));
}
