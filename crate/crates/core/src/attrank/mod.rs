//! AttRank: a random researcher who, after reading a paper, follows one of
//! its references with probability `alpha`, jumps to a paper in proportion
//! to the citations it gathered in the last `y` years with probability
//! `beta`, or jumps to a paper favouring recent publications with
//! probability `gamma`.
//!
//! Scores are the stationary distribution of
//!
//! ```text
//! y = alpha * S y + beta * A + gamma * T,     alpha + beta + gamma = 1
//! ```
//!
//! where `A` is the attention vector and `T_i ∝ exp(eta * age_i)` the
//! recency vector. `beta = 0` gives the NO-ATT variant (and with `eta = 0`
//! plain PageRank); `beta = 1` gives ATT-ONLY.

mod config;

pub use config::{AttRankConfig, PartialParams};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::CitationGraph;
use crate::error::{Error, Result};
use crate::walkcore::{walk_fixed_point, Solution, SolveOptions, TeleportVector, TransitionView};

const SUM_SLACK: f64 = 1e-12;

/// How citations inside the attention window are turned into a
/// distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttentionMode {
    /// Fraction of all window citations received by each paper.
    #[default]
    CountFraction,
    /// Reference-normalized columns of window papers, weighted linearly by
    /// recency: the newest year weighs `y`, the oldest window year `1`.
    WeightedReference,
}

impl FromStr for AttentionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "count_fraction" | "count" => Ok(AttentionMode::CountFraction),
            "weighted_reference" | "weighted" => Ok(AttentionMode::WeightedReference),
            other => Err(Error::InvalidParameter(format!("unknown attention mode `{other}`"))),
        }
    }
}

impl fmt::Display for AttentionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AttentionMode::CountFraction => "count_fraction",
            AttentionMode::WeightedReference => "weighted_reference",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttRankParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub eta: f64,
    pub y: u32,
    pub attention_mode: AttentionMode,
}

impl AttRankParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, eta: f64, y: u32) -> Result<Self> {
        let p = AttRankParams {
            alpha,
            beta,
            gamma,
            eta,
            y,
            attention_mode: AttentionMode::default(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_mode(mut self, mode: AttentionMode) -> Self {
        self.attention_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta), ("gamma", self.gamma)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!("{name} must be in [0, 1], got {v}")));
            }
        }
        let total = self.alpha + self.beta + self.gamma;
        if (total - 1.0).abs() > SUM_SLACK {
            return Err(Error::InvalidParameter(format!(
                "alpha+beta+gamma must equal 1, got {total}"
            )));
        }
        if !(self.eta <= 0.0 && self.eta.is_finite()) {
            return Err(Error::InvalidParameter(format!("eta must be <= 0, got {}", self.eta)));
        }
        if self.y == 0 {
            return Err(Error::InvalidParameter("y must be at least 1".into()));
        }
        Ok(())
    }
}

/// Unnormalized attention weights over the papers of `g`.
pub fn attention_weights(g: &CitationGraph, y: u32, mode: AttentionMode) -> Result<Vec<f64>> {
    if y == 0 {
        return Err(Error::InvalidParameter("y must be at least 1".into()));
    }
    let n = g.paper_count();
    let mut w = vec![0.0; n];
    let Some(newest) = g.newest_year() else {
        return Err(Error::EmptyWindow);
    };
    let first_year = i64::from(newest) - i64::from(y) + 1;
    // papers are in temporal order, so the window is a suffix
    for j in (0..n).rev() {
        let year = i64::from(g.year(j));
        if year < first_year {
            break;
        }
        let refs = g.references(j);
        match mode {
            AttentionMode::CountFraction => {
                for &i in refs {
                    w[i as usize] += 1.0;
                }
            }
            AttentionMode::WeightedReference => {
                if refs.is_empty() {
                    continue;
                }
                let weight = (year - first_year + 1) as f64 / refs.len() as f64;
                for &i in refs {
                    w[i as usize] += weight;
                }
            }
        }
    }
    if w.iter().all(|&x| x == 0.0) {
        return Err(Error::EmptyWindow);
    }
    Ok(w)
}

/// Distribution of recent attention: citations made in the last `y`
/// publication years of the view.
pub fn attention_vector(g: &CitationGraph, y: u32, mode: AttentionMode) -> Result<TeleportVector> {
    TeleportVector::from_weights(attention_weights(g, y, mode)?)
}

/// `T_i ∝ exp(eta * (newest_year - year_i))`.
pub fn recency_vector(g: &CitationGraph, eta: f64) -> Result<TeleportVector> {
    if !(eta <= 0.0 && eta.is_finite()) {
        return Err(Error::InvalidParameter(format!("eta must be <= 0, got {eta}")));
    }
    let newest = g.newest_year().ok_or(Error::TooFewPapers(0, 1))?;
    TeleportVector::from_weights(
        (0..g.paper_count())
            .map(|i| (eta * f64::from(newest - g.year(i))).exp())
            .collect(),
    )
}

/// Least-squares slope of `ln p(age)` over the tail `age >= tail_start`,
/// using only buckets with `p > 0`.
pub fn fit_eta(dist: &[f64], tail_start: usize) -> Result<f64> {
    let points: Vec<(f64, f64)> = dist
        .iter()
        .enumerate()
        .skip(tail_start)
        .filter(|(_, &p)| p > 0.0)
        .map(|(age, &p)| (age as f64, p.ln()))
        .collect();
    if points.len() < 3 {
        return Err(Error::InsufficientTail(points.len()));
    }
    let k = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / k;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mean_x).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Solves the AttRank fixed point for explicitly supplied attention and
/// recency distributions. A vector may be `None` only when its coefficient
/// is zero.
pub fn attrank_with_vectors(
    g: &CitationGraph,
    alpha: f64,
    beta: f64,
    gamma: f64,
    attention: Option<&TeleportVector>,
    recency: Option<&TeleportVector>,
    opts: &SolveOptions,
) -> Result<Solution> {
    let n = g.paper_count();
    if n == 0 {
        return Err(Error::TooFewPapers(0, 1));
    }
    let mut jump = vec![0.0; n];
    for (coef, vec, name) in [(beta, attention, "attention"), (gamma, recency, "recency")] {
        if coef == 0.0 {
            continue;
        }
        let v = vec.ok_or_else(|| Error::InvalidParameter(format!("{name} vector required")))?;
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: v.len(),
            });
        }
        for (j, &p) in jump.iter_mut().zip(v.values()) {
            *j += coef * p;
        }
    }
    let view = TransitionView::new(g);
    walk_fixed_point(&view, alpha, &jump, vec![1.0 / n as f64; n], opts)
}

/// Like [`attrank_solve`] but returns unconverged solutions instead of an
/// error.
pub fn attrank_trace(g: &CitationGraph, params: &AttRankParams, opts: &SolveOptions) -> Result<Solution> {
    params.validate()?;
    let attention = if params.beta > 0.0 {
        Some(attention_vector(g, params.y, params.attention_mode)?)
    } else {
        None
    };
    let recency = if params.gamma > 0.0 {
        Some(recency_vector(g, params.eta)?)
    } else {
        None
    };
    attrank_with_vectors(
        g,
        params.alpha,
        params.beta,
        params.gamma,
        attention.as_ref(),
        recency.as_ref(),
        opts,
    )
}

/// AttRank scores of every paper in `g`, iterated from the uniform vector
/// until the L1 residual drops below `opts.tol`.
pub fn attrank_solve(g: &CitationGraph, params: &AttRankParams, opts: &SolveOptions) -> Result<Solution> {
    attrank_trace(g, params, opts)?.require_converged()
}
