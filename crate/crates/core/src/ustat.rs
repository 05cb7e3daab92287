//! U-statistics: exact evaluation, incomplete (subsampled) estimation,
//! and nested Monte Carlo estimation of the Hoeffding projection
//! variance ζ = Var E[h(X₁,…,X_m) | X₁].

use std::sync::Arc;

use rand::RngExt;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::{det_from_columns, ColumnMatrix};
use crate::moments;
use crate::randomness::{fill_gaussian, SeededStream};
use crate::subsets::{binomial, sum_over_subsets_with};
use crate::{Error, Result};

/// Cap on C(N,m) for exact evaluation, shared with the geometry module.
pub use crate::geometry::SUBSET_BUDGET;

type KernelFn = dyn Fn(&ColumnMatrix) -> f64 + Send + Sync;

/// A symmetric real kernel of order m on vectors in R^dim.
///
/// The evaluator receives its m arguments as the columns of a dim×m
/// matrix; it must be symmetric under column permutation and safe to
/// call concurrently.
#[derive(Clone)]
pub struct UStatKernel {
    label: String,
    order: usize,
    dim: usize,
    eval: Arc<KernelFn>,
}

impl std::fmt::Debug for UStatKernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("UStatKernel")
            .field("label", &self.label)
            .field("order", &self.order)
            .field("dim", &self.dim)
            .finish()
    }
}

impl UStatKernel {
    pub fn new(
        label: impl Into<String>,
        order: usize,
        dim: usize,
        eval: impl Fn(&ColumnMatrix) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { label: label.into(), order, dim, eval: Arc::new(eval) }
    }

    /// h(x₁,…,xₙ) = |det[x₁⋯xₙ]| on R^n.
    pub fn abs_det(n: usize) -> Self {
        let idx: Vec<usize> = (0..n).collect();
        Self::new("abs-det", n, n, move |m| det_from_columns(m, &idx).abs())
    }

    /// h = det² on R^n.
    pub fn det_sq(n: usize) -> Self {
        let idx: Vec<usize> = (0..n).collect();
        Self::new("det-sq", n, n, move |m| {
            let d = det_from_columns(m, &idx);
            d * d
        })
    }

    /// h = 2^n |det| − β_n det², the kernel behind the projected-cube CLT.
    pub fn clt_combined(n: usize) -> Self {
        let idx: Vec<usize> = (0..n).collect();
        let two_n = 2f64.powi(n as i32);
        let beta = moments::beta_n(n);
        Self::new("clt-combined", n, n, move |m| {
            let d = det_from_columns(m, &idx).abs();
            two_n * d - beta * d * d
        })
    }

    /// h = (2^n / n!) |det|, the mixed volume V(x₁,…,xₙ) of segments.
    pub fn mixed_volume(n: usize) -> Self {
        let idx: Vec<usize> = (0..n).collect();
        let scale = 2f64.powi(n as i32) * (-libm::lgamma(n as f64 + 1.0)).exp();
        Self::new("mixed-volume", n, n, move |m| scale * det_from_columns(m, &idx).abs())
    }

    /// Constant kernel of the given order.
    pub fn constant(order: usize, dim: usize, value: f64) -> Self {
        Self::new("constant", order, dim, move |_| value)
    }

    /// Order-1 kernel returning the first coordinate.
    pub fn first_coordinate(dim: usize) -> Self {
        Self::new("first-coordinate", 1, dim, |m| m.col(0)[0])
    }

    /// Look up one of the registered kernel labels:
    /// `abs-det`, `det-sq`, `clt-combined`.
    pub fn by_label(label: &str, n: usize) -> Result<Self> {
        match label {
            "abs-det" => Ok(Self::abs_det(n)),
            "det-sq" => Ok(Self::det_sq(n)),
            "clt-combined" => Ok(Self::clt_combined(n)),
            other => Err(Error::InvalidInput(format!(
                "unknown kernel label '{other}' (expected abs-det, det-sq, clt-combined)"
            ))),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, args: &ColumnMatrix) -> f64 {
        debug_assert_eq!(args.dim(), self.dim);
        debug_assert_eq!(args.ncols(), self.order);
        (self.eval)(args)
    }
}

/// A distribution over vectors in R^dim, drivable from any stream.
pub trait VectorLaw: Sync {
    fn dim(&self) -> usize;
    fn sample_into(&self, rng: &mut ChaCha8Rng, out: &mut [f64]);
}

/// The standard Gaussian law on R^dim.
#[derive(Debug, Clone, Copy)]
pub struct GaussianLaw {
    pub dim: usize,
}

impl VectorLaw for GaussianLaw {
    fn dim(&self) -> usize {
        self.dim
    }

    fn sample_into(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        fill_gaussian(rng, out);
    }
}

/// Exact U-statistic: the kernel average over all C(N,m) subsets of the
/// data columns. Deterministic and chunk-parallel.
pub fn exact_ustat(kernel: &UStatKernel, data: &ColumnMatrix) -> Result<f64> {
    let m = kernel.order();
    let n_cols = data.ncols();
    if data.dim() != kernel.dim() {
        return Err(Error::InvalidInput(format!(
            "kernel expects vectors in R^{}, data has dimension {}",
            kernel.dim(),
            data.dim()
        )));
    }
    if n_cols < m {
        return Err(Error::InvalidInput(format!(
            "U-statistic of order {m} needs at least {m} data vectors, got {n_cols}"
        )));
    }
    let total = binomial(n_cols, m);
    let sum = sum_over_subsets_with(
        n_cols,
        m,
        SUBSET_BUDGET,
        || ColumnMatrix::zeros(kernel.dim(), m),
        |scratch, idx| {
            for (j, &c) in idx.iter().enumerate() {
                scratch.col_mut(j).copy_from_slice(data.col(c));
            }
            kernel.eval(scratch)
        },
    )?;
    Ok(sum / total as f64)
}

/// Kernel average over an explicit list of index sets. The exact
/// U-statistic is this average over the full enumeration; kept public
/// as the reference for the incomplete estimator.
pub fn average_over_index_sets(
    kernel: &UStatKernel,
    data: &ColumnMatrix,
    sets: &[Vec<usize>],
) -> Result<f64> {
    if sets.is_empty() {
        return Err(Error::InvalidInput("need at least one index set".into()));
    }
    let mut scratch = ColumnMatrix::zeros(kernel.dim(), kernel.order());
    let mut acc = 0.0;
    for set in sets {
        if set.len() != kernel.order() {
            return Err(Error::InvalidInput(format!(
                "index set size {} does not match kernel order {}",
                set.len(),
                kernel.order()
            )));
        }
        for (j, &c) in set.iter().enumerate() {
            scratch.col_mut(j).copy_from_slice(data.col(c));
        }
        acc += kernel.eval(&scratch);
    }
    Ok(acc / sets.len() as f64)
}

/// Incomplete U-statistic: kernel average over `draws` uniformly sampled
/// m-subsets. Unbiased for [`exact_ustat`].
pub fn incomplete_ustat(
    kernel: &UStatKernel,
    data: &ColumnMatrix,
    draws: usize,
    stream: &SeededStream,
) -> Result<f64> {
    if draws == 0 {
        return Err(Error::InvalidInput("incomplete U-statistic needs draws >= 1".into()));
    }
    let m = kernel.order();
    let n_cols = data.ncols();
    if n_cols < m {
        return Err(Error::InvalidInput(format!(
            "U-statistic of order {m} needs at least {m} data vectors, got {n_cols}"
        )));
    }
    let mut rng = stream.rng();
    let mut scratch = ColumnMatrix::zeros(kernel.dim(), m);
    let mut idx = vec![0usize; m];
    let mut acc = 0.0;
    for _ in 0..draws {
        // Floyd's algorithm: uniform m-subset of {0..n_cols}
        for (slot, j) in (n_cols - m..n_cols).enumerate() {
            let t = rng.random_range(0..=j);
            if idx[..slot].contains(&t) {
                idx[slot] = j;
            } else {
                idx[slot] = t;
            }
        }
        for (j, &c) in idx.iter().enumerate() {
            scratch.col_mut(j).copy_from_slice(data.col(c));
        }
        acc += kernel.eval(&scratch);
    }
    Ok(acc / draws as f64)
}

/// Nested Monte Carlo estimate of ζ = Var E[h | X₁].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZetaEstimate {
    /// Bias-corrected estimate, clamped at zero.
    pub zeta_hat: f64,
    /// Uncorrected-for-sign value (may dip slightly negative).
    pub raw: f64,
    pub outer_count: usize,
    pub inner_count: usize,
    /// Batch-means standard error of the estimate.
    pub std_error: f64,
    /// True when the raw estimate was negative and reported as zero.
    pub clamped: bool,
}

/// Estimate ζ by conditioning on `outer` draws of X₁, approximating each
/// conditional mean with `inner` fresh draws of X₂,…,X_m, and subtracting
/// the within-draw sampling variance over `inner` from the raw variance
/// of the conditional-mean estimates.
pub fn estimate_zeta(
    kernel: &UStatKernel,
    law: &dyn VectorLaw,
    outer: usize,
    inner: usize,
    stream: &SeededStream,
) -> Result<ZetaEstimate> {
    if outer < 100 || inner < 100 {
        return Err(Error::InvalidInput(format!(
            "zeta estimation needs outer >= 100 and inner >= 100, got {outer}/{inner}"
        )));
    }
    if law.dim() != kernel.dim() {
        return Err(Error::InvalidInput(format!(
            "law samples R^{}, kernel expects R^{}",
            law.dim(),
            kernel.dim()
        )));
    }
    let m = kernel.order();
    let dim = kernel.dim();

    // (conditional mean estimate, within-draw variance of the inner evals)
    let per_outer: Vec<(f64, f64)> = (0..outer)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream.child(i as u64).rng();
            let mut args = ColumnMatrix::zeros(dim, m);
            law.sample_into(&mut rng, args.col_mut(0));
            if m == 1 {
                return (kernel.eval(&args), 0.0);
            }
            let mut mean = 0.0;
            let mut m2 = 0.0;
            for j in 0..inner {
                for c in 1..m {
                    law.sample_into(&mut rng, args.col_mut(c));
                }
                let h = kernel.eval(&args);
                let d = h - mean;
                mean += d / (j + 1) as f64;
                m2 += d * (h - mean);
            }
            (mean, m2 / (inner - 1) as f64)
        })
        .collect();

    let correction = |gs: &[(f64, f64)]| -> f64 {
        let k = gs.len() as f64;
        let mean_g = gs.iter().map(|t| t.0).sum::<f64>() / k;
        let var_g = gs.iter().map(|t| (t.0 - mean_g).powi(2)).sum::<f64>() / (k - 1.0);
        let mean_s2 = gs.iter().map(|t| t.1).sum::<f64>() / k;
        if m == 1 {
            var_g
        } else {
            var_g - mean_s2 / inner as f64
        }
    };

    let raw = correction(&per_outer);

    // batch means for the standard error
    let batches = 20.min(outer / 50).max(2);
    let batch_len = outer / batches;
    let batch_vals: Vec<f64> =
        (0..batches).map(|b| correction(&per_outer[b * batch_len..(b + 1) * batch_len])).collect();
    let bmean = batch_vals.iter().sum::<f64>() / batches as f64;
    let bvar = batch_vals.iter().map(|v| (v - bmean).powi(2)).sum::<f64>() / (batches - 1) as f64;
    let std_error = (bvar / batches as f64).sqrt();

    let clamped = raw < 0.0;
    Ok(ZetaEstimate {
        zeta_hat: raw.max(0.0),
        raw,
        outer_count: outer,
        inner_count: inner,
        std_error,
        clamped,
    })
}

/// One row of the variance-law table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceCheckRow {
    pub n_cols: usize,
    /// Empirical Var U_N across the replications.
    pub var_un: f64,
    /// ζ̂ used in the normalization.
    pub zeta_hat: f64,
    /// N · Var(U_N) / (m² ζ̂); approaches 1 under Hoeffding's variance law.
    pub ratio: f64,
}

/// Empirical check of Var U_N = m²ζ/N + O(N⁻²): for each N draw
/// `replications` independent data sets, evaluate the exact U-statistic,
/// and report N·Var(U_N)/(m²ζ̂) with ζ̂ estimated once by [`estimate_zeta`].
pub fn ustat_variance_check(
    kernel: &UStatKernel,
    law: &dyn VectorLaw,
    n_grid: &[usize],
    replications: usize,
    stream: &SeededStream,
) -> Result<Vec<VarianceCheckRow>> {
    if replications < 2 {
        return Err(Error::InvalidInput("variance check needs replications >= 2".into()));
    }
    let zeta = estimate_zeta(kernel, law, 1000, 1000, &stream.child(u64::MAX - 1))?;
    let m = kernel.order();
    let dim = kernel.dim();
    let mut rows = Vec::with_capacity(n_grid.len());
    for (gi, &n_cols) in n_grid.iter().enumerate() {
        let row_stream = stream.child(gi as u64);
        let us: Vec<f64> = (0..replications)
            .into_par_iter()
            .map(|r| {
                let mut rng = row_stream.child(r as u64).rng();
                let mut data = ColumnMatrix::zeros(dim, n_cols);
                for j in 0..n_cols {
                    law.sample_into(&mut rng, data.col_mut(j));
                }
                exact_ustat(kernel, &data)
            })
            .collect::<Result<_>>()?;
        let mean = us.iter().sum::<f64>() / replications as f64;
        let var = us.iter().map(|u| (u - mean).powi(2)).sum::<f64>() / (replications - 1) as f64;
        let denom = (m * m) as f64 * zeta.zeta_hat;
        let ratio = if denom > 0.0 { n_cols as f64 * var / denom } else { f64::NAN };
        rows.push(VarianceCheckRow { n_cols, var_un: var, zeta_hat: zeta.zeta_hat, ratio });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{zonotope_volume, Zonotope};
    use crate::randomness::sample_gaussian_matrix;

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn constant_kernel_averages_to_constant() {
        let k = UStatKernel::constant(2, 3, 2.5);
        let data = sample_gaussian_matrix(3, 9, &SeededStream::new(1, 0));
        assert_eq!(exact_ustat(&k, &data).unwrap(), 2.5);
    }

    #[test]
    fn order_one_identity_kernel_is_sample_mean() {
        let k = UStatKernel::first_coordinate(2);
        let data = sample_gaussian_matrix(2, 40, &SeededStream::new(2, 0));
        let u = exact_ustat(&k, &data).unwrap();
        let mean = (0..40).map(|j| data.col(j)[0]).sum::<f64>() / 40.0;
        assert!((u - mean).abs() < 1e-12);
    }

    #[test]
    fn abs_det_ustat_matches_zonotope_volume() {
        let n = 2usize;
        let big_n = 9usize;
        let data = sample_gaussian_matrix(n, big_n, &SeededStream::new(3, 0));
        let u = exact_ustat(&UStatKernel::abs_det(n), &data).unwrap();
        let vol = zonotope_volume(&Zonotope::new(data)).unwrap();
        let lhs = 4.0 * binomial(big_n, n) as f64 * u;
        assert!(rel_close(lhs, vol, 1e-10), "{lhs} vs {vol}");
    }

    #[test]
    fn exact_ustat_invariant_under_data_permutation() {
        let n = 2usize;
        let data = sample_gaussian_matrix(n, 8, &SeededStream::new(5, 0));
        let mut perm: Vec<usize> = (0..8).collect();
        perm.reverse();
        perm.swap(1, 4);
        let cols: Vec<crate::linalg::Vector> = perm
            .iter()
            .map(|&j| crate::linalg::Vector::new(data.col(j).to_vec()).unwrap())
            .collect();
        let shuffled = ColumnMatrix::from_columns(&cols).unwrap();
        let a = exact_ustat(&UStatKernel::abs_det(n), &data).unwrap();
        let b = exact_ustat(&UStatKernel::abs_det(n), &shuffled).unwrap();
        assert!((a - b).abs() < 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn built_in_kernels_are_symmetric() {
        let n = 3usize;
        let data = sample_gaussian_matrix(n, n, &SeededStream::new(7, 0));
        let perms: [[usize; 3]; 3] = [[1, 0, 2], [2, 1, 0], [1, 2, 0]];
        for kernel in [UStatKernel::abs_det(n), UStatKernel::det_sq(n), UStatKernel::clt_combined(n)]
        {
            let base = kernel.eval(&data);
            for p in perms {
                let cols: Vec<crate::linalg::Vector> = p
                    .iter()
                    .map(|&j| crate::linalg::Vector::new(data.col(j).to_vec()).unwrap())
                    .collect();
                let permuted = ColumnMatrix::from_columns(&cols).unwrap();
                // pivoting order may differ under permutation; agreement is
                // to machine precision, not bitwise
                let v = kernel.eval(&permuted);
                assert!(
                    (v - base).abs() <= 1e-14 * base.abs().max(1.0),
                    "kernel {}: {v} vs {base}",
                    kernel.label()
                );
            }
        }
    }

    #[test]
    fn full_enumeration_average_equals_exact() {
        let n = 2usize;
        let data = sample_gaussian_matrix(n, 7, &SeededStream::new(11, 0));
        let kernel = UStatKernel::abs_det(n);
        let mut sets = Vec::new();
        for i in 0..7 {
            for j in (i + 1)..7 {
                sets.push(vec![i, j]);
            }
        }
        let a = average_over_index_sets(&kernel, &data, &sets).unwrap();
        let b = exact_ustat(&kernel, &data).unwrap();
        assert!((a - b).abs() < 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn incomplete_constant_kernel_any_draws() {
        let k = UStatKernel::constant(2, 2, -1.25);
        let data = sample_gaussian_matrix(2, 12, &SeededStream::new(13, 0));
        let v = incomplete_ustat(&k, &data, 37, &SeededStream::new(13, 1)).unwrap();
        assert_eq!(v, -1.25);
    }

    #[test]
    fn incomplete_tracks_exact_within_noise() {
        let n = 2usize;
        let data = sample_gaussian_matrix(n, 10, &SeededStream::new(17, 0));
        let kernel = UStatKernel::abs_det(n);
        let exact = exact_ustat(&kernel, &data).unwrap();
        let draws = 100_000usize;
        let est = incomplete_ustat(&kernel, &data, draws, &SeededStream::new(17, 1)).unwrap();
        // kernel values on a fixed data set have bounded spread; 3 rough SEs
        let spread = {
            let mut sets = Vec::new();
            for i in 0..10 {
                for j in (i + 1)..10 {
                    sets.push(vec![i, j]);
                }
            }
            let mut scratch = ColumnMatrix::zeros(n, n);
            let vals: Vec<f64> = sets
                .iter()
                .map(|s| {
                    for (c, &i) in s.iter().enumerate() {
                        scratch.col_mut(c).copy_from_slice(data.col(i));
                    }
                    kernel.eval(&scratch)
                })
                .collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (vals.len() - 1) as f64).sqrt()
        };
        let se = spread / (draws as f64).sqrt();
        assert!((est - exact).abs() < 3.0 * se, "est {est} exact {exact} se {se}");
    }

    #[test]
    fn incomplete_is_unbiased_over_runs() {
        let n = 2usize;
        let data = sample_gaussian_matrix(n, 9, &SeededStream::new(19, 0));
        let kernel = UStatKernel::abs_det(n);
        let exact = exact_ustat(&kernel, &data).unwrap();
        let runs = 1000usize;
        let draws = 50usize;
        let means: Vec<f64> = (0..runs)
            .map(|r| incomplete_ustat(&kernel, &data, draws, &SeededStream::new(19, r as u64 + 1)).unwrap())
            .collect();
        let mean = means.iter().sum::<f64>() / runs as f64;
        let var = means.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (runs - 1) as f64;
        let se = (var / runs as f64).sqrt();
        assert!((mean - exact).abs() < 3.0 * se, "mean {mean} exact {exact} se {se}");
    }

    #[test]
    fn zeta_constant_kernel_is_zero() {
        let k = UStatKernel::constant(2, 2, 3.0);
        let law = GaussianLaw { dim: 2 };
        let z = estimate_zeta(&k, &law, 200, 100, &SeededStream::new(23, 0)).unwrap();
        assert!(z.raw.abs() <= 3.0 * z.std_error.max(1e-15), "raw {} se {}", z.raw, z.std_error);
    }

    #[test]
    fn zeta_order_one_kernel_recovers_variance() {
        let k = UStatKernel::first_coordinate(3);
        let law = GaussianLaw { dim: 3 };
        let z = estimate_zeta(&k, &law, 4000, 100, &SeededStream::new(29, 0)).unwrap();
        assert!((z.zeta_hat - 1.0).abs() < 3.0 * z.std_error, "zeta {} se {}", z.zeta_hat, z.std_error);
    }

    #[test]
    fn zeta_mixed_volume_kernel_matches_closed_form() {
        // Var E[V(X1,X2)|X1] = zeta1/(n!)^2 at n=2
        let n = 2usize;
        let k = UStatKernel::mixed_volume(n);
        let law = GaussianLaw { dim: n };
        let z = estimate_zeta(&k, &law, 2000, 500, &SeededStream::new(31, 0)).unwrap();
        let want = moments::zeta1(n, moments::RadialLaw::GaussianNorm) / 4.0;
        assert!(
            (z.zeta_hat - want).abs() < 3.0 * z.std_error,
            "zeta {} want {want} se {}",
            z.zeta_hat,
            z.std_error
        );
    }

    #[test]
    fn zeta_abs_det_matches_scaled_closed_form() {
        // For h = |det| the conditional mean is ||X1|| E|N(0,1)|, so
        // zeta = (2/pi) Var chi_n; equivalently zeta1 / 4^n.
        let n = 2usize;
        let k = UStatKernel::abs_det(n);
        let law = GaussianLaw { dim: n };
        let z = estimate_zeta(&k, &law, 2000, 500, &SeededStream::new(37, 0)).unwrap();
        let want = moments::zeta1(n, moments::RadialLaw::GaussianNorm) / 16.0;
        assert!(
            (z.zeta_hat - want).abs() < 3.0 * z.std_error,
            "zeta {} want {want} se {}",
            z.zeta_hat,
            z.std_error
        );
    }

    #[test]
    fn zeta_rejects_tiny_sample_counts() {
        let k = UStatKernel::abs_det(2);
        let law = GaussianLaw { dim: 2 };
        assert!(estimate_zeta(&k, &law, 50, 1000, &SeededStream::new(1, 0)).is_err());
        assert!(estimate_zeta(&k, &law, 1000, 50, &SeededStream::new(1, 0)).is_err());
    }

    #[test]
    fn variance_law_order_one_kernel() {
        let k = UStatKernel::first_coordinate(1);
        let law = GaussianLaw { dim: 1 };
        let rows =
            ustat_variance_check(&k, &law, &[50, 100], 10_000, &SeededStream::new(41, 0)).unwrap();
        for row in rows {
            assert!((row.ratio - 1.0).abs() < 0.10, "N={}: ratio {}", row.n_cols, row.ratio);
        }
    }

    #[test]
    fn variance_law_abs_det_kernel() {
        let k = UStatKernel::abs_det(2);
        let law = GaussianLaw { dim: 2 };
        let rows =
            ustat_variance_check(&k, &law, &[100], 2000, &SeededStream::new(43, 0)).unwrap();
        assert!((rows[0].ratio - 1.0).abs() < 0.20, "ratio {}", rows[0].ratio);
    }

    #[test]
    fn variance_law_constant_kernel_degenerates() {
        let k = UStatKernel::constant(2, 2, 7.0);
        let law = GaussianLaw { dim: 2 };
        let rows = ustat_variance_check(&k, &law, &[20, 40], 500, &SeededStream::new(47, 0)).unwrap();
        for row in rows {
            assert_eq!(row.var_un, 0.0);
        }
    }

    #[test]
    fn slln_gap_shrinks_with_n() {
        let n = 2usize;
        let kernel = UStatKernel::abs_det(n);
        let delta = moments::delta_np(n, 1.0);
        let reps = 400usize;
        let grid = [20usize, 40, 80];
        let mut mads = Vec::new();
        let mut final_gap = 0.0;
        for (gi, &big_n) in grid.iter().enumerate() {
            let us: Vec<f64> = (0..reps)
                .into_par_iter()
                .map(|r| {
                    let s = SeededStream::new(53, (gi * reps + r) as u64);
                    let data = sample_gaussian_matrix(n, big_n, &s);
                    exact_ustat(&kernel, &data).unwrap()
                })
                .collect();
            let mad = us.iter().map(|u| (u - delta).abs()).sum::<f64>() / reps as f64;
            mads.push(mad);
            if gi == grid.len() - 1 {
                let mean = us.iter().sum::<f64>() / reps as f64;
                final_gap = (mean - delta).abs();
            }
        }
        assert!(mads[0] > mads[1] && mads[1] > mads[2], "mads {mads:?}");
        assert!(final_gap < 0.05 * delta, "final gap {final_gap}");
    }

    #[test]
    fn registry_labels_resolve() {
        for label in ["abs-det", "det-sq", "clt-combined"] {
            let k = UStatKernel::by_label(label, 2).unwrap();
            assert_eq!(k.label(), label);
        }
        assert!(UStatKernel::by_label("nope", 2).is_err());
    }
}
