//! Experiment orchestration for the random-zonotope CLT suite.
//!
//! Each experiment draws seeded Monte Carlo replications from
//! `zonoclt-core`, reduces them to per-N summary rows (means, variances,
//! Kolmogorov-Smirnov distances, variance ratios), and emits JSON or CSV
//! reports. Statistical outputs are a pure function of (config, seed):
//! replications carry their own random stream and reductions run in a
//! fixed order, so thread count never changes a reported number.

mod error;

pub mod config;
pub mod emit;
pub mod experiments;
pub mod report;
pub mod stats;

pub use config::{ExperimentConfig, ExperimentKind, OutputFormat};
pub use error::{HarnessError, Result};
pub use report::ExperimentReport;

/// Run an experiment on a dedicated thread pool of `cfg.threads` workers
/// (0 means all available cores).
pub fn run_with_threads(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let threads = if cfg.threads == 0 {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    } else {
        cfg.threads
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| HarnessError::ThreadPool(e.to_string()))?;
    pool.install(|| experiments::run(cfg))
}
