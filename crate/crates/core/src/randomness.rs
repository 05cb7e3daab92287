//! Deterministic, splittable random sampling.
//!
//! Every sampler is a pure function of its parameters and a
//! [`SeededStream`]. A stream is a value `(master_seed, stream_index)`;
//! the pair is hashed into a fresh ChaCha8 key, so distinct indices give
//! statistically independent counter-based generators and parallel
//! replications are reproducible regardless of thread scheduling.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::linalg::{orthonormalize_rows, ColumnMatrix, OrthonormalBasis};
use crate::{Error, Result};

/// SplitMix64 finalizer; bijective with good bit diffusion.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A reproducible random stream identified by `(master_seed, stream_index)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeededStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl SeededStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        Self { master_seed, stream_index }
    }

    /// Derive a child stream; children of distinct parents or indices are
    /// independent.
    pub fn child(&self, index: u64) -> Self {
        let derived = mix64(self.master_seed ^ mix64(self.stream_index ^ 0x5851_F42D_4C95_7F2D));
        Self { master_seed: derived, stream_index: index }
    }

    /// The generator for this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut state = mix64(self.master_seed) ^ mix64(self.stream_index ^ 0xA5A5_A5A5_A5A5_A5A5);
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            state = mix64(state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        ChaCha8Rng::from_seed(key)
    }
}

/// An n×N matrix of i.i.d. standard normals.
pub fn sample_gaussian_matrix(n: usize, big_n: usize, stream: &SeededStream) -> ColumnMatrix {
    assert!(n >= 1 && big_n >= 1, "matrix dimensions must be positive");
    let mut rng = stream.rng();
    let data: Vec<f64> = (0..n * big_n).map(|_| rng.sample(StandardNormal)).collect();
    ColumnMatrix::from_flat(n, big_n, data).expect("dimensions match by construction")
}

/// Fill `out` with i.i.d. standard normals from an existing generator.
pub fn fill_gaussian(rng: &mut ChaCha8Rng, out: &mut [f64]) {
    for v in out {
        *v = rng.sample(StandardNormal);
    }
}

/// One chi variate with k degrees of freedom, via the square root of a
/// gamma(k/2, 2) draw. O(1) per draw at any k.
pub fn sample_chi(k: usize, stream: &SeededStream) -> Result<f64> {
    let mut rng = stream.rng();
    chi_draw(k, &mut rng)
}

fn chi_draw(k: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidInput("chi needs at least one degree of freedom".into()));
    }
    let gamma = Gamma::new(0.5 * k as f64, 2.0)
        .map_err(|e| Error::InvalidInput(format!("gamma sampler: {e}")))?;
    Ok(gamma.sample(rng).sqrt())
}

/// A Haar-distributed n-dimensional subspace of R^N, represented by an
/// orthonormal row basis obtained from a fresh Gaussian matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrassmannSample {
    pub basis: OrthonormalBasis,
}

pub fn sample_grassmannian(n: usize, big_n: usize, stream: &SeededStream) -> Result<GrassmannSample> {
    if n > big_n {
        return Err(Error::InvalidInput(format!(
            "subspace dimension {n} exceeds ambient dimension {big_n}"
        )));
    }
    let g = sample_gaussian_matrix(n, big_n, stream);
    // Gaussian rows are a.s. independent; retry cannot recurse forever.
    match orthonormalize_rows(&g) {
        Ok(basis) => Ok(GrassmannSample { basis }),
        Err(Error::RankDeficient { .. }) => {
            let basis = orthonormalize_rows(&sample_gaussian_matrix(n, big_n, &stream.child(u64::MAX)))?;
            Ok(GrassmannSample { basis })
        }
        Err(e) => Err(e),
    }
}

/// A draw distributed as Y_N = χ_N χ_{N−1} ··· χ_{N−n+1}
/// (the law of det(GG*)^{1/2} for an n×N Gaussian matrix), sampled as a
/// product of independent chi variates.
pub fn sample_ynfactor(n: usize, big_n: usize, stream: &SeededStream) -> Result<f64> {
    if n == 0 || big_n < n {
        return Err(Error::InvalidInput(format!("ynfactor needs N >= n >= 1, got n={n}, N={big_n}")));
    }
    let mut rng = stream.rng();
    let mut product = 1.0;
    for k in (big_n - n + 1..=big_n).rev() {
        product *= chi_draw(k, &mut rng)?;
    }
    Ok(product)
}
