//! Zonotope volumes, mixed volumes of segments, cube projections, and
//! the splitting triple (X_N, Y_N, Z_N).
//!
//! A zonotope here is Σᵢ [−xᵢ, xᵢ] for generators xᵢ ∈ R^n, i.e. the
//! image of the cube [−1,1]^N under the n×N generator matrix. Its volume
//! is the exact subset sum 2^n Σ |det| over all n-column minors; the
//! inclusion-exclusion mixed-volume formula is kept as an independent
//! oracle for small instances.

use serde::{Deserialize, Serialize};

use crate::linalg::{det_from_columns, gram_det_sqrt, ColumnMatrix, Vector};
use crate::moments;
use crate::randomness::{sample_gaussian_matrix, GrassmannSample, SeededStream};
use crate::subsets::sum_over_subsets;
use crate::{Error, Result};

/// Cap on C(N,n) for exact enumeration.
pub const SUBSET_BUDGET: u128 = 100_000_000;

/// A zonotope given by its generator matrix (one generator per column).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Zonotope {
    generators: ColumnMatrix,
}

impl Zonotope {
    pub fn new(generators: ColumnMatrix) -> Self {
        Self { generators }
    }

    pub fn from_generators(generators: &[Vector]) -> Result<Self> {
        Ok(Self { generators: ColumnMatrix::from_columns(generators)? })
    }

    pub fn dim(&self) -> usize {
        self.generators.dim()
    }

    pub fn generators(&self) -> &ColumnMatrix {
        &self.generators
    }
}

/// Exact volume 2^n Σ |det[x_{i₁}⋯x_{iₙ}]| over all n-subsets of the
/// generators. Chunk-parallel; the result does not depend on chunking
/// or thread count. Rank-deficient generator sets give 0.
pub fn zonotope_volume(z: &Zonotope) -> Result<f64> {
    let n = z.dim();
    let ncols = z.generators.ncols();
    let sum = sum_over_subsets(ncols, n, SUBSET_BUDGET, |idx| {
        det_from_columns(&z.generators, idx).abs()
    })?;
    Ok(2f64.powi(n as i32) * sum)
}

/// Mixed volume of n origin-symmetric segments in R^n:
/// V(x₁,…,xₙ) = (2^n / n!) |det[x₁⋯xₙ]|.
pub fn mixed_volume_segments(segments: &[Vector]) -> Result<f64> {
    let n = match segments.first() {
        Some(s) => s.dim(),
        None => return Err(Error::InvalidInput("mixed volume needs at least one segment".into())),
    };
    if segments.len() != n {
        return Err(Error::InvalidInput(format!(
            "mixed volume of segments needs exactly n={n} vectors, got {}",
            segments.len()
        )));
    }
    let m = ColumnMatrix::from_columns(segments)?;
    let idx: Vec<usize> = (0..n).collect();
    let d = det_from_columns(&m, &idx).abs();
    let ln_fact = libm::lgamma(n as f64 + 1.0);
    Ok(2f64.powi(n as i32) * (-ln_fact).exp() * d)
}

/// Inclusion-exclusion oracle for the mixed volume of n segments:
/// V = (1/n!) Σⱼ (−1)^{n+j} Σ_{i₁<…<iⱼ} |K_{i₁}+…+K_{iⱼ}|,
/// with every Minkowski-sum volume computed by [`zonotope_volume`].
/// Testing aid only; limited to n ≤ 3.
pub fn minkowski_oracle(segments: &[Vector]) -> Result<f64> {
    let n = match segments.first() {
        Some(s) => s.dim(),
        None => return Err(Error::InvalidInput("oracle needs at least one segment".into())),
    };
    if segments.len() != n {
        return Err(Error::InvalidInput(format!(
            "oracle needs exactly n={n} segments, got {}",
            segments.len()
        )));
    }
    if n > 3 {
        return Err(Error::BudgetExceeded {
            n_cols: segments.len(),
            subset: n,
            binomial: 1 << n,
            cap: 8,
        });
    }
    let mut total = 0.0;
    for j in 1..=n {
        let sign = if (n + j) % 2 == 0 { 1.0 } else { -1.0 };
        let mut level = 0.0;
        let mut idx: Vec<usize> = (0..j).collect();
        loop {
            let chosen: Vec<Vector> = idx.iter().map(|&i| segments[i].clone()).collect();
            level += zonotope_volume(&Zonotope::from_generators(&chosen)?)?;
            let mut i = j as isize - 1;
            while i >= 0 && idx[i as usize] == n - j + i as usize {
                i -= 1;
            }
            if i < 0 {
                break;
            }
            let i = i as usize;
            idx[i] += 1;
            for t in i + 1..j {
                idx[t] = idx[t - 1] + 1;
            }
        }
        total += sign * level;
    }
    let ln_fact = libm::lgamma(n as f64 + 1.0);
    Ok(total * (-ln_fact).exp())
}

/// Volume of the projected cube P_E B_∞^N: in the coordinates of the
/// orthonormal basis the projection is the zonotope generated by the N
/// basis-matrix columns.
pub fn cube_projection_volume(e: &GrassmannSample) -> Result<f64> {
    zonotope_volume(&Zonotope::new(e.basis.matrix().clone()))
}

/// One Monte Carlo draw of the splitting X_N = Y_N · Z_N together with
/// the decomposition coefficients α, β, δ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplittingTriple {
    /// Volume of G B_∞^N.
    pub x: f64,
    /// det(GG*)^{1/2}.
    pub y: f64,
    /// Volume of P_E B_∞^N, computed as x / y.
    pub z: f64,
    /// N^{n/2} / Y_N.
    pub alpha: f64,
    /// N^{n/2} E X_N / (Y_N (Y_N + E Y_N) E Y_N).
    pub beta: f64,
    /// β_{N,n} · Var Y_N / N^{n−1/2}.
    pub delta: f64,
    /// Whether the Gaussian draw had to be redrawn once (rank-deficient).
    pub resampled: bool,
}

/// Draw G ~ Gaussian n×N and assemble the splitting triple.
///
/// A rank-deficient draw (probability zero; only degenerate fixtures
/// trigger it) is resampled once and flagged.
pub fn sample_splitting_triple(n: usize, big_n: usize, stream: &SeededStream) -> Result<SplittingTriple> {
    if n > big_n {
        return Err(Error::InvalidInput(format!("splitting needs N >= n, got n={n}, N={big_n}")));
    }
    let mut g = sample_gaussian_matrix(n, big_n, stream);
    let mut y = gram_det_sqrt(&g)?;
    let mut resampled = false;
    if y <= 0.0 {
        g = sample_gaussian_matrix(n, big_n, &stream.child(u64::MAX));
        y = gram_det_sqrt(&g)?;
        resampled = true;
        if y <= 0.0 {
            return Err(Error::RankDeficient { pivot: y, threshold: 0.0 });
        }
    }
    let x = zonotope_volume(&Zonotope::new(g))?;
    let z = x / y;

    let n_f = big_n as f64;
    let n_pow = n_f.powf(n as f64 / 2.0);
    let ex = moments::xn_mean(n, big_n);
    let ey = moments::yn_mean(n, big_n);
    let var_y = moments::yn_var(n, big_n);
    let alpha = n_pow / y;
    let beta = n_pow * ex / (y * (y + ey) * ey);
    let delta = beta * var_y / n_f.powf(n as f64 - 0.5);

    Ok(SplittingTriple { x, y, z, alpha, beta, delta, resampled })
}
