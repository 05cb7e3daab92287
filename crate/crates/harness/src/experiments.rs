//! The experiments: CLT verification, variance asymptotics, the Z_N
//! decomposition, Berry-Esseen decay, and moment scaling.
//!
//! Stream layout: replication `r` of grid row `row` draws from stream
//! index `(row << 40) | r`; nested ζ estimation owns the index `1 << 62`.
//! All replication results are collected in index order and reduced
//! sequentially, which keeps every statistic independent of thread count.

use std::time::Instant;

use rayon::prelude::*;
use zonoclt_core::geometry::{sample_splitting_triple, zonotope_volume, SplittingTriple, Zonotope};
use zonoclt_core::moments::{self, MomentTable};
use zonoclt_core::randomness::{sample_gaussian_matrix, sample_ynfactor, SeededStream};
use zonoclt_core::ustat::{estimate_zeta, exact_ustat, GaussianLaw, UStatKernel};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::report::{ConfigEcho, ExperimentReport, NRow, QqSeries};
use crate::stats::{ks_distance, lsq_slope, mean_var, normal_cdf, normal_quantile, standardize};
use crate::Result;

fn rep_stream(seed: u64, row: usize, rep: usize) -> SeededStream {
    SeededStream::new(seed, ((row as u64) << 40) | rep as u64)
}

fn zeta_stream(seed: u64) -> SeededStream {
    SeededStream::new(seed, 1 << 62)
}

fn ln_factorial(n: usize) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

/// Dispatch on the experiment kind; wall clock is measured here.
pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let start = Instant::now();
    let mut report = match cfg.experiment {
        ExperimentKind::XnClt => run_xn_clt(cfg),
        ExperimentKind::YnVariance => run_yn_experiments(cfg),
        ExperimentKind::ZnClt => run_zn_clt(cfg),
        ExperimentKind::Decomposition => run_decomposition_check(cfg),
        ExperimentKind::ZetaRatio => run_zeta_ratio(cfg),
        ExperimentKind::BerryEsseen => run_berry_esseen(cfg),
        ExperimentKind::MomentScaling => run_moment_scaling(cfg),
        ExperimentKind::MomentsDump => run_moments_dump(cfg),
    }?;
    report.wall_clock_secs = start.elapsed().as_secs_f64();
    Ok(report)
}

fn echo(cfg: &ExperimentConfig) -> ConfigEcho {
    ConfigEcho::from_config(cfg, rayon::current_num_threads())
}

fn kernel_for(cfg: &ExperimentConfig) -> Result<UStatKernel> {
    Ok(match &cfg.kernel {
        Some(label) => UStatKernel::by_label(label, cfg.n)?,
        None => UStatKernel::abs_det(cfg.n),
    })
}

fn sorted(mut xs: Vec<f64>) -> Vec<f64> {
    xs.sort_by(|a, b| a.partial_cmp(b).expect("statistics must not contain NaN"));
    xs
}

fn qq_series(n_cols: usize, standardized: Vec<f64>) -> QqSeries {
    let s = sorted(standardized);
    let m = s.len() as f64;
    let pairs =
        s.iter().enumerate().map(|(i, &v)| (normal_quantile((i as f64 + 0.5) / m), v)).collect();
    QqSeries { n_cols, pairs }
}

/// Draw `replications` values of X_N per grid point.
fn draw_xn(cfg: &ExperimentConfig, row: usize, big_n: usize) -> Result<Vec<f64>> {
    let n = cfg.n;
    let xs = (0..cfg.replications)
        .into_par_iter()
        .map(|r| {
            let g = sample_gaussian_matrix(n, big_n, &rep_stream(cfg.master_seed, row, r));
            zonotope_volume(&Zonotope::new(g))
        })
        .collect::<zonoclt_core::Result<Vec<f64>>>()?;
    Ok(xs)
}

/// CLT for X_N: self-standardized KS distance per N, plus the variance
/// ratio Var X_N / (N^{2n−1} c_n) which approaches 1.
pub fn run_xn_clt(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(echo(cfg));
    let cn = moments::cn_limit(cfg.n);
    for (row, &big_n) in cfg.n_grid.iter().enumerate() {
        let xs = draw_xn(cfg, row, big_n)?;
        let (mean, var) = mean_var(&xs);
        let std = standardize(&xs);
        let mut r = NRow::new(big_n, mean, var);
        r.ks_d = Some(ks_distance(&std, normal_cdf)?);
        r.var_ratio = Some(var / (big_n as f64).powi(2 * cfg.n as i32 - 1) / cn);
        report.rows.push(r);
        if cfg.emit_qq {
            report.qq.push(qq_series(big_n, std));
        }
    }
    Ok(report)
}

/// Variance ratio Var Y_N/(N^{n−1}·n/2) and the pinned-normalization CLT
/// statistic √N(Y_N²/N^n − 1)/√(2n), per N.
pub fn run_yn_experiments(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(echo(cfg));
    let n = cfg.n;
    for (row, &big_n) in cfg.n_grid.iter().enumerate() {
        let ys = (0..cfg.replications)
            .into_par_iter()
            .map(|r| sample_ynfactor(n, big_n, &rep_stream(cfg.master_seed, row, r)))
            .collect::<zonoclt_core::Result<Vec<f64>>>()?;
        let (mean, var) = mean_var(&ys);
        let n_f = big_n as f64;
        let stat: Vec<f64> = ys
            .iter()
            .map(|y| n_f.sqrt() * (y * y / n_f.powi(n as i32) - 1.0) / (2.0 * n as f64).sqrt())
            .collect();
        let mut r = NRow::new(big_n, mean, var);
        r.ks_d = Some(ks_distance(&stat, normal_cdf)?);
        r.var_ratio = Some(var / n_f.powi(n as i32 - 1) / (n as f64 / 2.0));
        report.rows.push(r);
        if cfg.emit_qq {
            report.qq.push(qq_series(big_n, stat));
        }
    }
    Ok(report)
}

fn draw_triples(
    cfg: &ExperimentConfig,
    row: usize,
    big_n: usize,
) -> Result<Vec<SplittingTriple>> {
    let n = cfg.n;
    let triples = (0..cfg.replications)
        .into_par_iter()
        .map(|r| {
            let t = sample_splitting_triple(n, big_n, &rep_stream(cfg.master_seed, row, r))?;
            // harness-level re-assertion of the splitting identity
            let gap = (t.x - t.y * t.z).abs();
            assert!(
                gap <= 1e-9 * t.x.abs().max(1.0),
                "splitting identity violated at N={big_n}, rep {r}: |x - y z| = {gap}"
            );
            Ok(t)
        })
        .collect::<zonoclt_core::Result<Vec<_>>>()?;
    // degenerate draws are measure-zero; more than 0.1% means a bug
    let resampled = triples.iter().filter(|t| t.resampled).count() as u64;
    if resampled as f64 > 0.001 * cfg.replications as f64 {
        return Err(crate::HarnessError::DegenerateDraws {
            count: resampled,
            replications: cfg.replications,
        });
    }
    Ok(triples)
}

fn triple_summary(row: &mut NRow, triples: &[SplittingTriple]) {
    let m = triples.len() as f64;
    row.alpha_mean = Some(triples.iter().map(|t| t.alpha).sum::<f64>() / m);
    row.beta_mean = Some(triples.iter().map(|t| t.beta).sum::<f64>() / m);
    row.delta_mean = Some(triples.iter().map(|t| t.delta).sum::<f64>() / m);
    row.resamples = triples.iter().filter(|t| t.resampled).count() as u64;
}

/// CLT for Z_N: self-standardized KS distance, plus the variance ratio
/// n!·√(Var Z_N)/(N^{(n−1)/2}·n·√ζ̂) with ζ̂ estimated on the combined
/// kernel 2^n d − β_n d².
pub fn run_zn_clt(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(echo(cfg));
    let n = cfg.n;
    let kernel = UStatKernel::clt_combined(n);
    let law = GaussianLaw { dim: n };
    let zeta = estimate_zeta(&kernel, &law, 2000, 2000, &zeta_stream(cfg.master_seed))?;
    report.zeta_hat = Some(zeta.zeta_hat);
    report.zeta_std_error = Some(zeta.std_error);
    let n_fact = ln_factorial(n).exp();
    for (row_idx, &big_n) in cfg.n_grid.iter().enumerate() {
        let triples = draw_triples(cfg, row_idx, big_n)?;
        let zs: Vec<f64> = triples.iter().map(|t| t.z).collect();
        let (mean, var) = mean_var(&zs);
        let std = standardize(&zs);
        let mut r = NRow::new(big_n, mean, var);
        r.ks_d = Some(ks_distance(&std, normal_cdf)?);
        let scale = (big_n as f64).powf((n as f64 - 1.0) / 2.0);
        r.var_ratio = Some(n_fact * var.sqrt() / (scale * n as f64 * zeta.zeta_hat.sqrt()));
        triple_summary(&mut r, &triples);
        report.rows.push(r);
        if cfg.emit_qq {
            report.qq.push(qq_series(big_n, std));
        }
    }
    Ok(report)
}

/// Per-draw assembly of the Z_N expansion with all means from closed
/// forms (E Z_N = E X_N / E Y_N by independence); reports the largest
/// absolute residual and the empirical means of α, β, δ.
pub fn run_decomposition_check(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(echo(cfg));
    let n = cfg.n;
    let mut worst = 0.0f64;
    for (row_idx, &big_n) in cfg.n_grid.iter().enumerate() {
        let triples = draw_triples(cfg, row_idx, big_n)?;
        let ex = moments::xn_mean(n, big_n);
        let ey = moments::yn_mean(n, big_n);
        let ey_sq = moments::yn_sq_mean(n, big_n);
        let ez = ex / ey;
        let n_f = big_n as f64;
        let lhs_scale = n_f.powf((n as f64 - 1.0) / 2.0);
        let rhs_scale = n_f.powf(n as f64 - 0.5);
        for t in &triples {
            let lhs = (t.z - ez) / lhs_scale;
            let rhs = t.alpha * (t.x - ex) / rhs_scale
                - t.beta * (t.y * t.y - ey_sq) / rhs_scale
                - t.delta;
            worst = worst.max((lhs - rhs).abs());
        }
        let zs: Vec<f64> = triples.iter().map(|t| t.z).collect();
        let (mean, var) = mean_var(&zs);
        let mut r = NRow::new(big_n, mean, var);
        triple_summary(&mut r, &triples);
        report.rows.push(r);
    }
    report.max_abs_residual = Some(worst);
    Ok(report)
}

/// Hoeffding variance law for the configured kernel (default abs-det):
/// N·Var(U_N)/(m²ζ̂) per N, with ζ̂ from the nested estimator.
pub fn run_zeta_ratio(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let kernel = kernel_for(cfg)?;
    run_zeta_ratio_with(cfg, &kernel)
}

pub fn run_zeta_ratio_with(cfg: &ExperimentConfig, kernel: &UStatKernel) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(echo(cfg));
    let law = GaussianLaw { dim: kernel.dim() };
    let zeta = estimate_zeta(kernel, &law, 2000, 2000, &zeta_stream(cfg.master_seed))?;
    report.zeta_hat = Some(zeta.zeta_hat);
    report.zeta_std_error = Some(zeta.std_error);
    let m_sq = (kernel.order() * kernel.order()) as f64;
    for (row, &big_n) in cfg.n_grid.iter().enumerate() {
        let us = draw_ustats(cfg, kernel, row, big_n)?;
        let (mean, var) = mean_var(&us);
        let mut r = NRow::new(big_n, mean, var);
        r.var_ratio = Some(big_n as f64 * var / (m_sq * zeta.zeta_hat));
        report.rows.push(r);
    }
    Ok(report)
}

fn draw_ustats(
    cfg: &ExperimentConfig,
    kernel: &UStatKernel,
    row: usize,
    big_n: usize,
) -> Result<Vec<f64>> {
    let dim = kernel.dim();
    let us = (0..cfg.replications)
        .into_par_iter()
        .map(|r| {
            let data = sample_gaussian_matrix(dim, big_n, &rep_stream(cfg.master_seed, row, r));
            exact_ustat(kernel, &data)
        })
        .collect::<zonoclt_core::Result<Vec<f64>>>()?;
    Ok(us)
}

/// KS distance of the standardized U-statistic per N across a doubling
/// grid, with the fitted log-log decay slope.
pub fn run_berry_esseen(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let kernel = kernel_for(cfg)?;
    run_berry_esseen_with(cfg, &kernel)
}

pub fn run_berry_esseen_with(cfg: &ExperimentConfig, kernel: &UStatKernel) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(echo(cfg));
    for (row, &big_n) in cfg.n_grid.iter().enumerate() {
        let us = draw_ustats(cfg, kernel, row, big_n)?;
        let (mean, var) = mean_var(&us);
        let std = standardize(&us);
        let mut r = NRow::new(big_n, mean, var);
        r.ks_d = Some(ks_distance(&std, normal_cdf)?);
        report.rows.push(r);
        if cfg.emit_qq {
            report.qq.push(qq_series(big_n, std));
        }
    }
    let ln_n: Vec<f64> = report.rows.iter().map(|r| (r.n_cols as f64).ln()).collect();
    let ln_d: Vec<f64> = report.rows.iter().map(|r| r.ks_d.unwrap().ln()).collect();
    if ln_n.len() >= 2 {
        report.slope = Some(lsq_slope(&ln_n, &ln_d));
    }
    Ok(report)
}

/// Scaled central moments E|X_N − mean|^p / N^{p(n−1/2)} per N, with the
/// max/min ratio across the grid as the boundedness summary.
pub fn run_moment_scaling(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(echo(cfg));
    let p = cfg.p.unwrap_or(4);
    let exponent = p as f64 * (cfg.n as f64 - 0.5);
    let mut ratios = Vec::with_capacity(cfg.n_grid.len());
    for (row, &big_n) in cfg.n_grid.iter().enumerate() {
        let xs = draw_xn(cfg, row, big_n)?;
        let (mean, var) = mean_var(&xs);
        let m_p = xs.iter().map(|x| (x - mean).abs().powi(p as i32)).sum::<f64>()
            / cfg.replications as f64;
        let ratio = m_p / (big_n as f64).powf(exponent);
        ratios.push(ratio);
        let mut r = NRow::new(big_n, mean, var);
        r.var_ratio = Some(ratio);
        report.rows.push(r);
    }
    let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
    report.max_min_ratio = Some(max / min);
    Ok(report)
}

/// Dump the closed-form constants for n.
pub fn run_moments_dump(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(echo(cfg));
    report.moment_table = Some(MomentTable::build(cfg.n));
    Ok(report)
}
