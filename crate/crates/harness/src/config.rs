//! Experiment configuration and validation.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// CLT for the Gaussian zonotope volume X_N.
    XnClt,
    /// Variance ratio and CLT for the Gram factor Y_N.
    YnVariance,
    /// CLT for the projected-cube volume Z_N.
    ZnClt,
    /// Per-draw decomposition of Z_N into the X/Y² contributions.
    Decomposition,
    /// Hoeffding variance law N·Var(U_N)/(m²ζ).
    ZetaRatio,
    /// KS-distance decay of the U-statistic CLT across a doubling grid.
    BerryEsseen,
    /// Boundedness of E|X_N − E X_N|^p / N^{p(n−1/2)}.
    MomentScaling,
    /// Dump the closed-form moment table for n.
    MomentsDump,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::XnClt => "xn-clt",
            Self::YnVariance => "yn-variance",
            Self::ZnClt => "zn-clt",
            Self::Decomposition => "decomposition",
            Self::ZetaRatio => "zeta-ratio",
            Self::BerryEsseen => "berry-esseen",
            Self::MomentScaling => "moment-scaling",
            Self::MomentsDump => "moments-dump",
        }
    }

    /// Whether the experiment draws Monte Carlo samples.
    pub fn is_sampling(&self) -> bool {
        !matches!(self, Self::MomentsDump)
    }

    /// Grid used when the CLI does not pass one.
    pub fn default_grid(&self) -> Vec<usize> {
        match self {
            Self::XnClt => vec![50, 100, 200],
            Self::YnVariance => vec![100, 1000, 10_000],
            Self::ZnClt => vec![100, 200, 500],
            Self::Decomposition => vec![100, 500],
            Self::ZetaRatio => vec![50, 100],
            Self::BerryEsseen => vec![50, 100, 200],
            Self::MomentScaling => vec![25, 50, 100],
            Self::MomentsDump => vec![],
        }
    }

    pub fn default_replications(&self) -> usize {
        match self {
            Self::XnClt | Self::ZnClt | Self::Decomposition | Self::ZetaRatio => 2000,
            Self::YnVariance => 100_000,
            Self::BerryEsseen => 5000,
            Self::MomentScaling => 2000,
            Self::MomentsDump => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Full description of one harness run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub n: usize,
    pub n_grid: Vec<usize>,
    pub replications: usize,
    pub master_seed: u64,
    pub threads: usize,
    pub output_path: Option<PathBuf>,
    pub output_format: OutputFormat,
    pub emit_qq: bool,
    pub kernel: Option<String>,
    pub p: Option<u32>,
}

impl ExperimentConfig {
    /// A minimal valid config for the given experiment; callers override
    /// fields as needed.
    pub fn new(experiment: ExperimentKind, n: usize, master_seed: u64) -> Self {
        Self {
            experiment,
            n,
            n_grid: experiment.default_grid(),
            replications: experiment.default_replications(),
            master_seed,
            threads: 0,
            output_path: None,
            output_format: OutputFormat::Json,
            emit_qq: false,
            kernel: None,
            p: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(HarnessError::InvalidConfig("n must be at least 1".into()));
        }
        if self.experiment.is_sampling() {
            if self.n_grid.is_empty() {
                return Err(HarnessError::InvalidConfig("N grid must be nonempty".into()));
            }
            if !self.n_grid.windows(2).all(|w| w[0] < w[1]) {
                return Err(HarnessError::InvalidConfig(format!(
                    "N grid must be strictly increasing, got {:?}",
                    self.n_grid
                )));
            }
            if let Some(&small) = self.n_grid.iter().find(|&&big_n| big_n < self.n) {
                return Err(HarnessError::InvalidConfig(format!(
                    "every N must be at least n={}, got N={small}",
                    self.n
                )));
            }
            if self.replications < 100 {
                return Err(HarnessError::InvalidConfig(format!(
                    "sampling experiments need at least 100 replications, got {}",
                    self.replications
                )));
            }
        }
        if let Some(p) = self.p {
            if p != 2 && p != 4 {
                return Err(HarnessError::InvalidConfig(format!(
                    "moment exponent p must be 2 or 4, got {p}"
                )));
            }
        }
        if let Some(label) = &self.kernel {
            zonoclt_core::ustat::UStatKernel::by_label(label, self.n)
                .map_err(|e| HarnessError::InvalidConfig(e.to_string()))?;
        }
        if self.emit_qq && self.output_path.is_none() {
            return Err(HarnessError::InvalidConfig(
                "--emit-qq needs an output path to write quantile files next to".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_validates() {
        for kind in [
            ExperimentKind::XnClt,
            ExperimentKind::YnVariance,
            ExperimentKind::ZnClt,
            ExperimentKind::Decomposition,
            ExperimentKind::ZetaRatio,
            ExperimentKind::BerryEsseen,
            ExperimentKind::MomentScaling,
            ExperimentKind::MomentsDump,
        ] {
            ExperimentConfig::new(kind, 2, 1).validate().unwrap();
        }
    }

    #[test]
    fn rejects_unsorted_grid() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::XnClt, 2, 1);
        cfg.n_grid = vec![100, 50];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn rejects_grid_below_n() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::XnClt, 3, 1);
        cfg.n_grid = vec![2, 50];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn rejects_too_few_replications() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::ZnClt, 2, 1);
        cfg.replications = 10;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn rejects_bad_kernel_and_p() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::ZetaRatio, 2, 1);
        cfg.kernel = Some("nope".into());
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::new(ExperimentKind::MomentScaling, 2, 1);
        cfg.p = Some(3);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn qq_needs_output_path() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::XnClt, 2, 1);
        cfg.emit_qq = true;
        assert!(cfg.validate().is_err());
    }
}
