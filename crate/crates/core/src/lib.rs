//! Numerical core for random-zonotope experiments.
//!
//! The library computes exact zonotope volumes, Gram determinants and
//! Grassmannian cube projections for small dimensions, samples the joint
//! law of a random Gaussian zonotope volume and its splitting factors,
//! evaluates U-statistics with nested estimation of the Hoeffding
//! projection variance, and supplies the closed-form Gaussian moment
//! constants that the experiment harness checks against.
//!
//! Everything is deterministic given a [`randomness::SeededStream`]:
//! replications carry their own stream, so results are independent of
//! thread scheduling.

mod error;

pub mod geometry;
pub mod linalg;
pub mod moments;
pub mod randomness;
pub mod subsets;
pub mod ustat;

pub use error::{Error, Result};
