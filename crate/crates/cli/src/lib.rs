//! Command-line front end: runs the example families, arbitrary kernels and
//! the verifier suites, and emits deterministic JSON reports.

pub mod config;
pub mod error;
pub mod report;
pub mod runs;
pub mod sample;
pub mod suites;

pub use config::{seed_from_env, Command, KernelSource, RunConfig, DEFAULT_SEED};
pub use error::{CliError, Result};
pub use report::{render_table, Check, Report, Verdict};
pub use runs::{
    run, run_algebraic, run_compute_f, run_generalization, run_binary_difference, run_verifier_suite,
};
