//! Scripted cosmological scenarios, their metrics and the factor lattice.

mod config;
mod lattice;
mod rules;
mod scenario;

pub use config::{CustomRule, InitialState, ScenarioConfig, ScenarioKind, ScenarioParams};
pub use lattice::{FactorLattice, LatticeNode};
pub use rules::{
    ScenarioRule, CHAOS, FIXED_Z, GROUP_SCRAMBLE, INFLATION, RANDOM_ENTANGLING, RANDOM_LOCAL, SCHMIDT_EIGH_MAX_QUBITS,
};
pub use scenario::{
    initial_state, run_scenario, scenario_chaos, scenario_genesis, scenario_heatdeath, scenario_inflation, MetricsRow,
    Scenario, ScenarioRun,
};
