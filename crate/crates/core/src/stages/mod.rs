//! Stage evolution: test selection, Born-rule jumps and in-model memory.

mod engine;
mod info;
mod rule;
mod test_spec;

pub use engine::{
    apply_unlink, jump, jump_detailed, run, select_test, transition_probability, Engine, JumpReport, Stage, StepSummary, Trajectory,
};
pub use info::{
    update_information, AncestryEdge, InformationContent, OutcomeRecord, PartitionSnapshot, RetentionPolicy,
};
pub use rule::{labelled_basis_operator, scramble_test, FixedZRule, RandomLocalRule, Rule, ScrambleRule};
pub use test_spec::{eigen_residual, outcome_distribution, sample_outcome, Outcome, TestBlock, TestSpec, PROBABILITY_FLOOR};
