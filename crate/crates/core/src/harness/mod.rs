//! Experiment orchestration: run a method on the current view of a split,
//! score it against the short-term-impact ground truth, sweep parameter
//! grids and record convergence traces.

mod sweep;

pub use sweep::{sweep, Axis, Constraint, Metric, SweepGrid, SweepMethod, SweepResult, SweepRow};

use std::time::Instant;

use serde_json::json;

use crate::attrank::{attrank_solve, attrank_trace, AttRankParams};
use crate::baselines::{citerank_trace, futurerank_trace, Baseline};
use crate::corpus::{CitationGraph, SplitView};
use crate::error::{Error, Result};
use crate::metrics::{ndcg_at_k, ranking_from_scores, spearman_rho, EvalReport, NdcgTable};
use crate::walkcore::{pagerank, pagerank_trace, Solution, SolveOptions, TeleportVector, TransitionView};

/// Anything that scores the papers of a citation graph.
///
/// [`evaluate`] hands implementors the current view only; it is an owned
/// prefix graph, so future edges are out of reach.
pub trait Ranker: Sync {
    fn name(&self) -> String;
    fn params(&self) -> serde_json::Value;
    fn rank(&self, view: &CitationGraph, opts: &SolveOptions) -> Result<Solution>;
}

/// The built-in ranking methods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    AttRank(AttRankParams),
    /// PageRank with uniform teleport.
    PageRank { alpha: f64 },
    Baseline(Baseline),
}

impl Method {
    /// Iterative solve that keeps unconverged traces.
    pub fn trace(&self, g: &CitationGraph, opts: &SolveOptions) -> Result<Solution> {
        match self {
            Method::AttRank(p) => attrank_trace(g, p, opts),
            Method::PageRank { alpha } => pagerank_trace(
                &TransitionView::new(g),
                &TeleportVector::uniform(g.paper_count()),
                *alpha,
                opts,
            ),
            Method::Baseline(Baseline::CiteRank { alpha, tau_dir }) => citerank_trace(g, *alpha, *tau_dir, opts),
            Method::Baseline(Baseline::FutureRank(p)) => futurerank_trace(g, p, opts),
            Method::Baseline(b @ Baseline::Ecm { .. }) => b.run(g, opts),
            Method::Baseline(Baseline::Ram { .. }) => Err(Error::InvalidParameter(
                "ram is not an iterative method".into(),
            )),
        }
    }
}

impl Ranker for Method {
    fn name(&self) -> String {
        match self {
            Method::AttRank(_) => "attrank".into(),
            Method::PageRank { .. } => "pagerank".into(),
            Method::Baseline(b) => b.name().into(),
        }
    }

    fn params(&self) -> serde_json::Value {
        match self {
            Method::AttRank(p) => serde_json::to_value(p).unwrap_or_default(),
            Method::PageRank { alpha } => json!({ "alpha": alpha }),
            Method::Baseline(b) => {
                let mut v = serde_json::to_value(b).unwrap_or_default();
                if let Some(obj) = v.as_object_mut() {
                    obj.remove("method");
                }
                v
            }
        }
    }

    fn rank(&self, view: &CitationGraph, opts: &SolveOptions) -> Result<Solution> {
        match self {
            Method::AttRank(p) => attrank_solve(view, p, opts),
            Method::PageRank { alpha } => pagerank(
                &TransitionView::new(view),
                &TeleportVector::uniform(view.paper_count()),
                *alpha,
                opts,
            ),
            Method::Baseline(b) => b.run(view, opts),
        }
    }
}

/// Evaluation settings shared by `evaluate` and `sweep`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub ks: Vec<usize>,
    pub exclude_zero_truth: bool,
    pub opts: SolveOptions,
}

pub const DEFAULT_KS: [usize; 5] = [5, 10, 50, 100, 500];

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            ks: DEFAULT_KS.to_vec(),
            exclude_zero_truth: true,
            opts: SolveOptions::default(),
        }
    }
}

/// Ranks the current view of `split` with `method` and compares the result
/// with the split's short-term impact.
pub fn evaluate(method: &dyn Ranker, split: &SplitView, cfg: &EvalConfig) -> Result<EvalReport> {
    let started = Instant::now();
    let sol = method.rank(&split.current, &cfg.opts)?;
    let runtime_ms = started.elapsed().as_secs_f64() * 1e3;
    let scores = sol.scores.values();
    let truth = split.sti.values();
    if scores.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            actual: scores.len(),
        });
    }
    let spearman = spearman_rho(scores, truth, cfg.exclude_zero_truth)?;
    let ranking = ranking_from_scores(scores);
    let ndcg = cfg
        .ks
        .iter()
        .map(|&k| ndcg_at_k(&ranking, truth, k).map(|v| (k, v)))
        .collect::<Result<Vec<_>>>()?;
    let n_evaluated = if cfg.exclude_zero_truth {
        truth.iter().filter(|&&t| t != 0.0).count()
    } else {
        truth.len()
    };
    Ok(EvalReport {
        method: method.name(),
        params: method.params(),
        spearman,
        ndcg: NdcgTable(ndcg),
        n_evaluated,
        exclude_zero_truth: cfg.exclude_zero_truth,
        iterations: sol.iterations,
        runtime_ms,
        error: None,
    })
}

/// Iteration count and per-iteration L1 residuals of an iterative method
/// run on the current view.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ConvergenceReport {
    pub method: String,
    pub iterations: usize,
    pub converged: bool,
    pub residuals: Vec<f64>,
}

impl ConvergenceReport {
    /// True when every residual is below its predecessor.
    pub fn strictly_decreasing(&self) -> bool {
        self.residuals.windows(2).all(|w| w[1] < w[0])
    }
}

/// Runs `method` on the current view, keeping the residual trace even if
/// the iteration cap is reached.
pub fn convergence_report(method: &Method, split: &SplitView, opts: &SolveOptions) -> Result<ConvergenceReport> {
    let sol = method.trace(&split.current, opts)?;
    Ok(ConvergenceReport {
        method: method.name(),
        iterations: sol.iterations,
        converged: sol.converged,
        residuals: sol.residuals,
    })
}
