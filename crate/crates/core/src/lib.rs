//! Ranking papers by expected short-term impact in citation networks.
//!
//! The crate is organized bottom-up:
//!
//! - [`corpus`]: graph loading, temporal splits, ground truth
//! - [`walkcore`]: transition operator, PageRank, dense oracle, contraction
//! - [`attrank`]: attention + recency + reference-following ranking
//! - [`baselines`]: CiteRank, FutureRank, RAM, ECM
//! - [`metrics`]: Spearman's rho, nDCG@k, recent-popularity overlap
//! - [`harness`]: evaluation, parameter sweeps, convergence traces
//! - [`synth`]: synthetic citation networks for tests and benchmarks
//!
//! Row-wise kernels and sweep cells run on rayon when the `parallel`
//! feature (on by default) is enabled; see [`par::Exec`].

pub mod attrank;
pub mod baselines;
pub mod corpus;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod par;
pub mod synth;
pub mod walkcore;

pub use error::{Error, Result};
