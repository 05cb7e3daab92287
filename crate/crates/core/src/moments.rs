//! Closed-form Gaussian moment constants.
//!
//! The absolute determinant of an n×n standard Gaussian matrix factors
//! in law as a product of independent chi variables χ_n·χ_{n−1}···χ_1,
//! which reduces every constant here to chi moments, i.e. to gamma
//! function evaluations. Factorial-scale quantities are assembled in
//! log space and exponentiated once.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::subsets::ln_binomial;

/// Radial law for [`zeta1`]; only the Gaussian norm (chi) case is built in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RadialLaw {
    /// R distributed as the Euclidean norm of a standard Gaussian in R^n,
    /// i.e. a chi variable with n degrees of freedom.
    GaussianNorm,
}

/// ln E χ_k^p = (p/2)·ln 2 + ln Γ((k+p)/2) − ln Γ(k/2).
fn ln_chi_moment(k: usize, p: f64) -> f64 {
    debug_assert!(k >= 1, "chi moment needs k >= 1");
    debug_assert!(p >= 0.0, "chi moment needs p >= 0");
    let k = k as f64;
    0.5 * p * std::f64::consts::LN_2 + libm::lgamma(0.5 * (k + p)) - libm::lgamma(0.5 * k)
}

/// E χ_k^p, the p-th moment of a chi variable with k degrees of freedom.
pub fn chi_moment(k: usize, p: f64) -> f64 {
    ln_chi_moment(k, p).exp()
}

/// ln Δ_{n,p} where Δ_{n,p}^p = E|det[g₁⋯g_n]|^p for standard Gaussian columns.
fn ln_delta_np(n: usize, p: f64) -> f64 {
    let log_sum: f64 = (1..=n).map(|k| ln_chi_moment(k, p)).sum();
    log_sum / p
}

/// Δ_{n,p} = (E|det[g₁⋯g_n]|^p)^{1/p}, via the chi factorization
/// |det| =_d χ_n·χ_{n−1}···χ_1.
pub fn delta_np(n: usize, p: f64) -> f64 {
    ln_delta_np(n, p).exp()
}

/// β_n = 2^{n−1} Δ_{n,1} / Δ_{n,2}².
pub fn beta_n(n: usize) -> f64 {
    ((n as f64 - 1.0) * std::f64::consts::LN_2 + ln_delta_np(n, 1.0) - 2.0 * ln_delta_np(n, 2.0))
        .exp()
}

/// E D_n, the mean absolute determinant of n independent uniform
/// directions on S^{n−1}: Δ_{n,1} / (E χ_n)^n.
pub fn mean_dn(n: usize) -> f64 {
    (ln_delta_np(n, 1.0) - n as f64 * ln_chi_moment(n, 1.0)).exp()
}

/// ζ₁ = 4^n · Var R · (E R)^{2(n−1)} · (E D_n)² for the given radial law.
pub fn zeta1(n: usize, law: RadialLaw) -> f64 {
    match law {
        RadialLaw::GaussianNorm => {
            let mean_r = chi_moment(n, 1.0);
            let var_r = n as f64 - mean_r * mean_r;
            let e_dn = mean_dn(n);
            4f64.powi(n as i32) * var_r * mean_r.powi(2 * (n as i32 - 1)) * e_dn * e_dn
        }
    }
}

/// Limit of Var X_N / N^{2n−1}: c_n = n² ζ₁ / (n!)².
pub fn cn_limit(n: usize) -> f64 {
    let ln_nfact = libm::lgamma(n as f64 + 1.0);
    (n * n) as f64 * zeta1(n, RadialLaw::GaussianNorm) * (-2.0 * ln_nfact).exp()
}

/// E X_N = 2^n C(N,n) Δ_{n,1}.
pub fn xn_mean(n: usize, big_n: usize) -> f64 {
    (n as f64 * std::f64::consts::LN_2 + ln_binomial(big_n, n) + ln_delta_np(n, 1.0)).exp()
}

/// E Y_N = E χ_N · E χ_{N−1} ··· E χ_{N−n+1}.
pub fn yn_mean(n: usize, big_n: usize) -> f64 {
    assert!(big_n >= n, "yn_mean needs N >= n");
    let log_sum: f64 = (big_n - n + 1..=big_n).map(|k| ln_chi_moment(k, 1.0)).sum();
    log_sum.exp()
}

/// E Y_N² = N!/(N−n)!, the falling factorial.
pub fn yn_sq_mean(n: usize, big_n: usize) -> f64 {
    assert!(big_n >= n, "yn_sq_mean needs N >= n");
    (libm::lgamma(big_n as f64 + 1.0) - libm::lgamma((big_n - n) as f64 + 1.0)).exp()
}

/// Var Y_N = E Y_N² − (E Y_N)².
pub fn yn_var(n: usize, big_n: usize) -> f64 {
    let mean = yn_mean(n, big_n);
    yn_sq_mean(n, big_n) - mean * mean
}

/// One named constant with a short provenance note.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentEntry {
    pub value: f64,
    pub note: String,
}

/// All closed-form constants for a fixed dimension n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentTable {
    pub n: usize,
    pub entries: BTreeMap<String, MomentEntry>,
}

impl MomentTable {
    pub fn build(n: usize) -> Self {
        let mut entries = BTreeMap::new();
        let mut put = |key: &str, value: f64, note: &str| {
            entries.insert(key.to_string(), MomentEntry { value, note: note.to_string() });
        };
        put("delta_n_1", delta_np(n, 1.0), "E|det| of an nxn standard Gaussian matrix");
        put("delta_n_2_sq", delta_np(n, 2.0).powi(2), "E det^2 = n!");
        put("beta_n", beta_n(n), "2^(n-1) delta_{n,1} / delta_{n,2}^2");
        put("mean_chi_n", chi_moment(n, 1.0), "mean of a chi variable with n dof");
        put("var_chi_n", n as f64 - chi_moment(n, 1.0).powi(2), "variance of chi_n");
        put("mean_dn", mean_dn(n), "mean |det| of n uniform directions on the sphere");
        put(
            "zeta1",
            zeta1(n, RadialLaw::GaussianNorm),
            "4^n Var(chi_n) (E chi_n)^(2n-2) (E D_n)^2",
        );
        put("c_n", cn_limit(n), "limit of Var X_N / N^(2n-1): n^2 zeta1 / (n!)^2");
        Self { n, entries }
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.entries.get(key).map(|e| e.value)
    }
}
