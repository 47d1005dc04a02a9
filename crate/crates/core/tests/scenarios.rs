use qstages::cosmo::{run_scenario, CustomRule, InitialState, Scenario, ScenarioConfig, ScenarioKind};
use qstages::qstate::{entanglement_entropy, mutual_information, partial_trace};
use qstages::factorize::DEFAULT_EPS;
use qstages::random::stream_rng;
use qstages::stages::{Engine, RandomLocalRule, Stage};
use qstages::{tensor_product, QubitSet, StateVector64};

#[test]
fn chaos_keeps_every_cut_entangled() {
    let config = ScenarioConfig::new(ScenarioKind::Chaos, 6, 6, 11);
    let run = Scenario::<f64>::new(config).unwrap();
    let mut cuts_checked = 0;
    run.run_with(|engine, _| {
        let s = &engine.stage().state;
        for mask in 1..(1u64 << 6) - 1 {
            assert!(entanglement_entropy(s, &QubitSet::from_mask(mask)).unwrap() > 1e-6);
            cuts_checked += 1;
        }
        Ok(())
    })
    .unwrap();
    assert!(cuts_checked > 0);
}

#[test]
fn frozen_qubits_keep_their_marginal() {
    // The active qubits advance through many stages while the frozen pair,
    // entangled only with itself, keeps its reduced state.
    let active = StateVector64::haar_random(3, &mut stream_rng(4, 0)).unwrap();
    let state = tensor_product(&active, &StateVector64::bell()).unwrap();
    let frozen = QubitSet::new([3, 4], 5).unwrap();
    let rule = RandomLocalRule::with_frozen(4, frozen.clone());
    let before = partial_trace(&state, &frozen).unwrap();
    let mut engine = Engine::new(Stage::new(state, "random-local"), &rule, 4, DEFAULT_EPS).unwrap();
    for _ in 0..10 {
        engine.step().unwrap();
        let now = partial_trace(&engine.stage().state, &frozen).unwrap();
        assert!(now.matrix().max_abs_diff(before.matrix()).unwrap() <= 1e-9);
    }
    assert_eq!(engine.stage().n, 10);
}

#[test]
fn custom_frozen_plus_register_is_untouched() {
    let mut config = ScenarioConfig::new(ScenarioKind::Custom, 4, 6, 4);
    config.params.rule = Some(CustomRule::FixedZ);
    config.params.frozen = Some(vec![2, 3]);
    config.params.initial = Some(InitialState::Plus);
    let run = run_scenario::<f64>(&config).unwrap();
    let s = &run.trajectory.final_stage.state;
    let rho = partial_trace(s, &QubitSet::single(3)).unwrap();
    assert!((rho.entry(0, 1).re - 0.5).abs() <= 1e-9);
}

#[test]
fn heatdeath_groups_stay_entangled_inside() {
    let mut config = ScenarioConfig::new(ScenarioKind::Heatdeath, 6, 12, 21);
    config.params.unlink_step = Some(4);
    let run = run_scenario::<f64>(&config).unwrap();
    for row in &run.metrics[4..] {
        assert!(row.max_cross_group_mi.unwrap() <= 1e-9, "{row:?}");
    }
    let last = &run.trajectory.final_stage.state;
    // Within-group witness: pairs inside one half share information.
    let inside = [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)];
    assert!(inside.iter().any(|&(i, j)| mutual_information(last, i, j).unwrap() > 1e-6));
    let half = QubitSet::new([0, 1, 2], 6).unwrap();
    assert!(entanglement_entropy(last, &QubitSet::single(0)).unwrap() > 1e-6);
    assert!(entanglement_entropy(last, &half).unwrap() < 1e-9);
}

#[test]
fn genesis_switches_from_chaos_to_splitting() {
    let mut config = ScenarioConfig::new(ScenarioKind::Genesis, 8, 8, 5);
    config.params.onset_step = Some(3);
    let run = run_scenario::<f64>(&config).unwrap();
    let counts: Vec<usize> = run.metrics.iter().map(|m| m.num_factors).collect();
    assert!(counts[..=3].iter().all(|&c| c == 1), "{counts:?}");
    assert!(counts[4] >= 2, "{counts:?}");
    assert_eq!(*counts.last().unwrap(), 8);
}

#[test]
fn f32_inflation_matches_f64_counts() {
    let config = ScenarioConfig::new(ScenarioKind::Inflation, 6, 4, 9);
    let a: Vec<usize> = run_scenario::<f64>(&config).unwrap().metrics.iter().map(|m| m.num_factors).collect();
    let b: Vec<usize> = run_scenario::<f32>(&config).unwrap().metrics.iter().map(|m| m.num_factors).collect();
    assert_eq!(a, b, "f64 {a:?} f32 {b:?}");
}
