use std::path::PathBuf;

use flab_core::algebraic_shift::WindowOptions;
use flab_core::f_invariant::{RateOptions, ReportOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{CliError, Result};

/// Seed used when `FLAB_SEED` is unset.
pub const DEFAULT_SEED: u64 = 20_240_601;

/// Where a convolution kernel comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelSource {
    /// A JSON kernel spec on disk.
    Path(PathBuf),
    /// A named kernel over `Z/pZ`.
    Preset { name: String, p: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "name")]
pub enum Command {
    Ow,
    Gen { k: String },
    Kernel { source: KernelSource },
    Verify { suites: Vec<String>, inject_bug: bool },
    ComputeF { process: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub rank: usize,
    pub n_max: usize,
    pub window_cap: usize,
    pub stable_threshold: usize,
    pub seed: u64,
    /// Not part of the report, so the same run written to different files
    /// stays byte-identical.
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::Ow,
            rank: 2,
            n_max: 2,
            window_cap: WindowOptions::default().window_cap,
            stable_threshold: RateOptions::default().stable_threshold,
            seed: DEFAULT_SEED,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn with_command(command: Command) -> Self {
        RunConfig {
            command,
            ..RunConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=26).contains(&self.rank) {
            return Err(CliError::Config(format!("rank must be in 1..=26, got {}", self.rank)));
        }
        if self.n_max == 0 {
            return Err(CliError::Config("n_max must be at least 1".into()));
        }
        if self.stable_threshold == 0 {
            return Err(CliError::Config("stable threshold must be at least 1".into()));
        }
        Ok(())
    }

    pub fn window_options(&self) -> WindowOptions {
        WindowOptions {
            window_cap: self.window_cap,
        }
    }

    pub fn rate_options(&self) -> RateOptions {
        RateOptions {
            stable_threshold: self.stable_threshold,
            ..RateOptions::default()
        }
    }

    pub fn report_options(&self) -> ReportOptions {
        ReportOptions {
            n_max: self.n_max,
            rates: self.rate_options(),
        }
    }

    /// An independent random stream per consumer, derived from the seed.
    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

/// Reads `FLAB_SEED`, falling back to [`DEFAULT_SEED`].
pub fn seed_from_env() -> Result<u64> {
    match std::env::var("FLAB_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("FLAB_SEED must be an unsigned integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}
