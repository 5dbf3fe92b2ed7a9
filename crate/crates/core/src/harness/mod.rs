//! Experiment configuration, presets, Monte-Carlo execution and output.

pub mod config;
pub mod presets;
mod report;
mod runner;

pub use config::{AlgorithmSpec, Arrival, BoundSpec, DoaPolicy, ExperimentConfig, ScenarioSpec, SweepSpec};
pub use report::{
    default_tau, emit_complexity_table, emit_csv, emit_sweep_csv, format_float, summary, write_text,
};
pub use runner::{
    aggregate, run_experiment, run_single, run_sweep, AggregateResult, AlgorithmAggregate, AlgorithmRun, Beamformer,
    RunFailure, RunOutput, StepOutcome, SweepPoint,
};
