use thiserror::Error;

/// Errors shared by all core modules.
#[derive(Debug, Error)]
pub enum Error {
    /// Mismatched or otherwise unusable arguments.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A matrix that should have full rank numerically does not.
    #[error("rank-deficient input: pivot {pivot:.3e} below threshold {threshold:.1e}")]
    RankDeficient { pivot: f64, threshold: f64 },

    /// An enumeration would exceed the documented compute budget.
    #[error("compute budget exceeded: C({n_cols},{subset}) = {binomial} subsets, cap is {cap}")]
    BudgetExceeded {
        n_cols: usize,
        subset: usize,
        binomial: u128,
        cap: u128,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
