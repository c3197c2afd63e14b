//! Experiment configuration, the optimization loop and report emission.

pub mod config;
pub mod report;
pub mod run;

pub use config::ExperimentConfig;
pub use report::emit_reports;
pub use run::{
    policy_config, reevaluate, run_baseline, run_gqe, run_random_baseline, BaselineKind, BestCircuit, Evaluation,
    IterationRecord, Problem, RunRecord, TrainingRow,
};
