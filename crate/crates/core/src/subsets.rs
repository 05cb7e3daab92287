//! Deterministic, chunk-parallel enumeration of k-subsets.
//!
//! Subsets are walked in lexicographic order and split into contiguous
//! rank ranges of fixed size. Each worker accumulates its chunk locally;
//! the ordered partials are then combined by pairwise summation, so the
//! result is bit-identical regardless of thread count and accumulation
//! error stays O(log #chunks).

use rayon::prelude::*;

use crate::{Error, Result};

/// Subsets per parallel chunk.
const CHUNK: u128 = 1 << 15;

/// Exact binomial coefficient C(n, k) as u128 (saturating).
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// ln C(n, k) via the log-gamma function (for moment formulas at large N).
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    libm::lgamma((n + 1) as f64) - libm::lgamma((k + 1) as f64) - libm::lgamma((n - k + 1) as f64)
}

/// Lexicographic unranking: the `rank`-th k-subset of {0,…,n−1}.
fn unrank(mut rank: u128, n: usize, k: usize, out: &mut Vec<usize>) {
    out.clear();
    let mut next = 0usize;
    for j in 0..k {
        let mut v = next;
        loop {
            let count = binomial(n - 1 - v, k - 1 - j);
            if count > rank {
                break;
            }
            rank -= count;
            v += 1;
        }
        out.push(v);
        next = v + 1;
    }
}

/// Advance `c` to the lexicographic successor; false when exhausted.
fn next_subset(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k as isize - 1;
    while i >= 0 && c[i as usize] == n - k + i as usize {
        i -= 1;
    }
    if i < 0 {
        return false;
    }
    let i = i as usize;
    c[i] += 1;
    for j in i + 1..k {
        c[j] = c[j - 1] + 1;
    }
    true
}

/// Pairwise (tree) summation of ordered partials.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

/// Σ f(S) over all k-subsets S of {0,…,n−1}, chunk-parallel.
///
/// Fails with a budget error when C(n,k) exceeds `cap`.
pub fn sum_over_subsets<F>(n: usize, k: usize, cap: u128, f: F) -> Result<f64>
where
    F: Fn(&[usize]) -> f64 + Sync,
{
    sum_over_subsets_with(n, k, cap, || (), |(), idx| f(idx))
}

/// Like [`sum_over_subsets`] but hands each worker a scratch value built
/// by `init`, so per-subset evaluation can stay allocation-free.
pub fn sum_over_subsets_with<S, I, F>(n: usize, k: usize, cap: u128, init: I, f: F) -> Result<f64>
where
    I: Fn() -> S + Sync,
    F: Fn(&mut S, &[usize]) -> f64 + Sync,
{
    let total = binomial(n, k);
    if total > cap {
        return Err(Error::BudgetExceeded { n_cols: n, subset: k, binomial: total, cap });
    }
    if total == 0 {
        return Ok(0.0);
    }
    let nchunks = total.div_ceil(CHUNK) as usize;
    let partials: Vec<f64> = (0..nchunks)
        .into_par_iter()
        .map(|chunk| {
            let start = chunk as u128 * CHUNK;
            let len = CHUNK.min(total - start);
            let mut idx = Vec::with_capacity(k);
            unrank(start, n, k, &mut idx);
            let mut scratch = init();
            let mut acc = 0.0;
            for step in 0..len {
                acc += f(&mut scratch, &idx);
                if step + 1 < len {
                    let more = next_subset(&mut idx, n);
                    debug_assert!(more);
                }
            }
            acc
        })
        .collect();
    Ok(pairwise_sum(&partials))
}
