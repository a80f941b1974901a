//! Column-stochastic transition operator over a citation graph, PageRank by
//! power iteration, a dense linear-solve oracle and node contraction.
//!
//! The operator `S` is never materialized. Column `j` is uniform `1/k_j`
//! over the `k_j` references of paper `j`; a paper without references
//! (dangling) spreads its mass uniformly over the first `support` papers,
//! which is all papers unless a narrower support is requested (see
//! [`TransitionView::with_dangling_support`]).

mod contraction;
mod dense;
mod vectors;

pub use contraction::{adjusted_teleport, contracted_pagerank, AdjustedTeleport};
pub use dense::{dense_transition, pagerank_dense_oracle, DenseSystem, DENSE_LIMIT};
pub use vectors::{read_scores_csv, ScoreVector, TeleportVector};

use crate::corpus::CitationGraph;
use crate::error::{Error, Result};
use crate::par::{self, Exec};

/// Default convergence threshold on the L1 residual.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Default iteration cap.
pub const DEFAULT_MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub exec: Exec,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            exec: Exec::default(),
        }
    }
}

impl SolveOptions {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidParameter(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// Result of an iterative solve: scores, iteration count and the L1
/// residual after every iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub scores: ScoreVector,
    pub iterations: usize,
    pub residuals: Vec<f64>,
    pub converged: bool,
}

impl Solution {
    pub fn residual(&self) -> f64 {
        self.residuals.last().copied().unwrap_or(0.0)
    }

    /// Turns an unconverged solution into `NoConvergence`.
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NoConvergence {
                iterations: self.iterations,
                residual: self.residual(),
            })
        }
    }
}

/// Implicit stochastic matrix `S` of a citation graph.
#[derive(Debug, Clone)]
pub struct TransitionView<'g> {
    graph: &'g CitationGraph,
    inv_out: Vec<f64>,
    dangling: Vec<u32>,
    support: usize,
}

impl<'g> TransitionView<'g> {
    pub fn new(graph: &'g CitationGraph) -> Self {
        Self::build(graph, graph.paper_count())
    }

    /// Dangling columns spread over papers `0..support` only.
    ///
    /// With `support = n`, a graph whose papers `n..` are never cited has the
    /// block form `[[S_n, B], [0, 0]]` required by node contraction.
    pub fn with_dangling_support(graph: &'g CitationGraph, support: usize) -> Result<Self> {
        if support == 0 || support > graph.paper_count() {
            return Err(Error::InvalidParameter(format!(
                "dangling support {support} outside 1..={}",
                graph.paper_count()
            )));
        }
        Ok(Self::build(graph, support))
    }

    fn build(graph: &'g CitationGraph, support: usize) -> Self {
        let n = graph.paper_count();
        let mut inv_out = vec![0.0; n];
        let mut dangling = Vec::new();
        for (j, w) in inv_out.iter_mut().enumerate() {
            match graph.out_degree(j) {
                0 => dangling.push(j as u32),
                k => *w = 1.0 / k as f64,
            }
        }
        TransitionView {
            graph,
            inv_out,
            dangling,
            support,
        }
    }

    pub fn graph(&self) -> &'g CitationGraph {
        self.graph
    }

    pub fn len(&self) -> usize {
        self.graph.paper_count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dangling_set(&self) -> &[u32] {
        &self.dangling
    }

    pub fn dangling_support(&self) -> usize {
        self.support
    }

    /// Entry `S[i, j]`.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if self.graph.out_degree(j) == 0 {
            if i < self.support {
                1.0 / self.support as f64
            } else {
                0.0
            }
        } else if self.graph.references(j).binary_search(&(i as u32)).is_ok() {
            self.inv_out[j]
        } else {
            0.0
        }
    }

    /// `out = S x`.
    pub fn matvec_into(&self, x: &[f64], out: &mut [f64], exec: Exec) -> Result<()> {
        let n = self.len();
        for len in [x.len(), out.len()] {
            if len != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: len,
                });
            }
        }
        let dangling_mass: f64 = self.dangling.iter().map(|&j| x[j as usize]).sum();
        let smear = dangling_mass / self.support as f64;
        let g = self.graph;
        let support = self.support;
        par::fill(out, exec, |i| {
            let pulled: f64 = g
                .citations(i)
                .iter()
                .map(|&j| x[j as usize] * self.inv_out[j as usize])
                .sum();
            if i < support {
                pulled + smear
            } else {
                pulled
            }
        });
        Ok(())
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; x.len()];
        self.matvec_into(x, &mut out, Exec::default())?;
        Ok(out)
    }
}

/// Iterates `x <- alpha S x + jump` from `start`.
///
/// `jump` must carry mass `1 - alpha` when `start` is a distribution. With
/// `alpha == 0` a single update is the exact fixed point.
pub(crate) fn walk_fixed_point(
    view: &TransitionView<'_>,
    alpha: f64,
    jump: &[f64],
    start: Vec<f64>,
    opts: &SolveOptions,
) -> Result<Solution> {
    opts.validate()?;
    let n = view.len();
    if jump.len() != n || start.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: if jump.len() != n { jump.len() } else { start.len() },
        });
    }
    let mut x = start;
    let mut sx = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut residuals = Vec::new();
    let mut converged = false;
    for _ in 0..opts.max_iter {
        if alpha == 0.0 {
            next.copy_from_slice(jump);
        } else {
            view.matvec_into(&x, &mut sx, opts.exec)?;
            par::fill(&mut next, opts.exec, |i| alpha * sx[i] + jump[i]);
        }
        let residual = par::sum(n, opts.exec, |i| (next[i] - x[i]).abs());
        std::mem::swap(&mut x, &mut next);
        residuals.push(residual);
        if alpha == 0.0 || residual < opts.tol {
            converged = true;
            break;
        }
    }
    Ok(Solution {
        scores: ScoreVector::distribution_unchecked(x),
        iterations: residuals.len(),
        residuals,
        converged,
    })
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!("alpha must be in [0, 1), got {alpha}")));
    }
    Ok(())
}

/// PageRank with teleport vector `u`; returns the solution even when the
/// iteration cap is hit (`converged == false`).
pub fn pagerank_trace(
    view: &TransitionView<'_>,
    u: &TeleportVector,
    alpha: f64,
    opts: &SolveOptions,
) -> Result<Solution> {
    check_alpha(alpha)?;
    if u.len() != view.len() {
        return Err(Error::DimensionMismatch {
            expected: view.len(),
            actual: u.len(),
        });
    }
    let jump: Vec<f64> = u.values().iter().map(|&p| (1.0 - alpha) * p).collect();
    walk_fixed_point(view, alpha, &jump, u.values().to_vec(), opts)
}

/// PageRank `v = alpha S v + (1 - alpha) u` by power iteration from `v = u`.
pub fn pagerank(
    view: &TransitionView<'_>,
    u: &TeleportVector,
    alpha: f64,
    opts: &SolveOptions,
) -> Result<Solution> {
    pagerank_trace(view, u, alpha, opts)?.require_converged()
}
