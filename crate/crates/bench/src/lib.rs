//! Sweeps a list of tolerances with multilevel and standard Monte Carlo and
//! records paths per level and cost for each.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiment;
pub mod output;

pub use config::{parse_eps_list, parse_name, ExperimentConfig, ModelConfig, Overrides, PayoffConfig};
pub use error::BenchError;
pub use experiment::{
    run_experiment, run_seed, EpsilonRecord, ExperimentReport, MethodRecord, RunRecord, Settings,
};
pub use output::{emit_csv, emit_json, emit_timing};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 1;
    pub const FLAGGED: i32 = 2;
}
