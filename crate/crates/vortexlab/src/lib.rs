//! Experiment harness for `vortex-core`.
//!
//! A run reads a JSON [`ExperimentConfig`], executes one [`Command`] and
//! produces [`Artifacts`]: a JSON report that embeds the config it came
//! from, plus CSV series. Reruns with the same config and seed give
//! byte-identical artifacts regardless of the thread count.

pub mod config;
pub mod error;
pub mod run;

pub use config::ExperimentConfig;
pub use error::{HarnessError, Result};
pub use run::{execute, Artifacts, Command};

/// Parses `text`, applies a seed override and runs `command` on a pool of
/// `threads` workers (rayon's default when `None`).
pub fn run_config(command: Command, text: &str, seed: Option<u64>, threads: Option<usize>) -> Result<Artifacts> {
    let mut cfg = ExperimentConfig::from_json(text)?;
    if seed.is_some() {
        cfg.seed = seed;
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| HarnessError::Schema(format!("thread pool: {e}")))?;
    pool.install(|| execute(command, &cfg))
}
