//! Experiment reports: per-N summary rows plus run provenance.

use serde::{Deserialize, Serialize};
use zonoclt_core::moments::MomentTable;

use crate::config::ExperimentConfig;

/// Build-time version string (git describe when available).
pub const VERSION: &str = env!("ZONOCLT_VERSION");

/// Echo of the configuration that produced a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub experiment: String,
    pub n: usize,
    pub n_grid: Vec<usize>,
    pub replications: usize,
    pub master_seed: u64,
    pub threads: usize,
    pub kernel: Option<String>,
    pub p: Option<u32>,
    pub version: String,
}

impl ConfigEcho {
    pub fn from_config(cfg: &ExperimentConfig, threads_used: usize) -> Self {
        Self {
            experiment: cfg.experiment.name().to_string(),
            n: cfg.n,
            n_grid: cfg.n_grid.clone(),
            replications: cfg.replications,
            master_seed: cfg.master_seed,
            threads: threads_used,
            kernel: cfg.kernel.clone(),
            p: cfg.p,
            version: VERSION.to_string(),
        }
    }
}

/// One per-N summary row. Fields that an experiment does not produce
/// stay `None` (empty in CSV).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NRow {
    pub n_cols: usize,
    pub mean: f64,
    pub var: f64,
    pub ks_d: Option<f64>,
    pub var_ratio: Option<f64>,
    pub alpha_mean: Option<f64>,
    pub beta_mean: Option<f64>,
    pub delta_mean: Option<f64>,
    pub resamples: u64,
}

impl NRow {
    pub fn new(n_cols: usize, mean: f64, var: f64) -> Self {
        Self {
            n_cols,
            mean,
            var,
            ks_d: None,
            var_ratio: None,
            alpha_mean: None,
            beta_mean: None,
            delta_mean: None,
            resamples: 0,
        }
    }
}

/// Theoretical-vs-sample quantile pairs for external plotting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QqSeries {
    pub n_cols: usize,
    pub pairs: Vec<(f64, f64)>,
}

/// Full output of one experiment run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ConfigEcho,
    pub rows: Vec<NRow>,
    /// ζ̂ used in variance normalizations, when estimated.
    pub zeta_hat: Option<f64>,
    pub zeta_std_error: Option<f64>,
    /// Fitted log-log slope of KS distance vs N (berry-esseen).
    pub slope: Option<f64>,
    /// Largest per-draw decomposition residual (decomposition).
    pub max_abs_residual: Option<f64>,
    /// Max/min of the scaled p-th moment across the grid (moment-scaling).
    pub max_min_ratio: Option<f64>,
    /// Closed-form constants (moments-dump).
    pub moment_table: Option<MomentTable>,
    /// Quantile pairs per N when requested.
    pub qq: Vec<QqSeries>,
    pub wall_clock_secs: f64,
}

impl ExperimentReport {
    pub fn new(config: ConfigEcho) -> Self {
        Self {
            config,
            rows: Vec::new(),
            zeta_hat: None,
            zeta_std_error: None,
            slope: None,
            max_abs_residual: None,
            max_min_ratio: None,
            moment_table: None,
            qq: Vec::new(),
            wall_clock_secs: 0.0,
        }
    }

    /// The statistic outputs alone — everything that must be identical
    /// across reruns with the same seed, regardless of thread count or
    /// wall clock.
    pub fn statistics_json(&self) -> String {
        #[derive(Serialize)]
        struct Stats<'a> {
            rows: &'a [NRow],
            zeta_hat: &'a Option<f64>,
            zeta_std_error: &'a Option<f64>,
            slope: &'a Option<f64>,
            max_abs_residual: &'a Option<f64>,
            max_min_ratio: &'a Option<f64>,
            qq: &'a [QqSeries],
        }
        serde_json::to_string(&Stats {
            rows: &self.rows,
            zeta_hat: &self.zeta_hat,
            zeta_std_error: &self.zeta_std_error,
            slope: &self.slope,
            max_abs_residual: &self.max_abs_residual,
            max_min_ratio: &self.max_min_ratio,
            qq: &self.qq,
        })
        .expect("report statistics always serialize")
    }

    /// CSV with one line per N row.
    pub fn rows_csv(&self) -> String {
        let mut out =
            String::from("N,mean,var,ks_d,var_ratio,alpha_mean,beta_mean,delta_mean,resamples\n");
        let opt = |v: &Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                r.n_cols,
                r.mean,
                r.var,
                opt(&r.ks_d),
                opt(&r.var_ratio),
                opt(&r.alpha_mean),
                opt(&r.beta_mean),
                opt(&r.delta_mean),
                r.resamples
            ));
        }
        out
    }
}
