//! FutureRank: PageRank coupled with a paper-author reinforcement and a
//! recency prior.
//!
//! Each round:
//!
//! ```text
//! a_k = Σ_{p by k} P_p / |authors(p)|          author scores
//! h_p = Σ_{k of p} a_k / |papers(k)|            author feedback, normalized
//! P'  = alpha S P + beta h + gamma T + (1 - alpha - beta - gamma) / n
//! ```
//!
//! with `T_p ∝ exp(rho * age_p)`, and `P'` renormalized to sum 1. Papers
//! without authors receive no author feedback.

use serde::{Deserialize, Serialize};

use crate::corpus::CitationGraph;
use crate::error::{Error, Result};
use crate::par;
use crate::walkcore::{ScoreVector, Solution, SolveOptions, TransitionView};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FutureRankParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub rho: f64,
}

impl FutureRankParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, rho: f64) -> Result<Self> {
        let p = FutureRankParams {
            alpha,
            beta,
            gamma,
            rho,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta), ("gamma", self.gamma)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!("{name} must be in [0, 1], got {v}")));
            }
        }
        let total = self.alpha + self.beta + self.gamma;
        if total > 1.0 + 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "alpha+beta+gamma must not exceed 1, got {total}"
            )));
        }
        if !(self.rho < 0.0 && self.rho.is_finite()) {
            return Err(Error::InvalidParameter(format!("rho must be negative, got {}", self.rho)));
        }
        Ok(())
    }

    fn uniform_share(&self) -> f64 {
        (1.0 - self.alpha - self.beta - self.gamma).max(0.0)
    }
}

/// Paper ↔ author incidence in compressed form.
struct AuthorLinks {
    paper_authors: Vec<Vec<u32>>,
    author_papers: Vec<Vec<u32>>,
}

impl AuthorLinks {
    fn build(g: &CitationGraph) -> Option<Self> {
        let auth = g.authors()?;
        let paper_authors: Vec<Vec<u32>> = (0..g.paper_count())
            .map(|p| auth.authors_of(p).to_vec())
            .collect();
        if paper_authors.iter().all(Vec::is_empty) {
            return None;
        }
        let mut author_papers = vec![Vec::new(); auth.author_count()];
        for (p, list) in paper_authors.iter().enumerate() {
            for &k in list {
                author_papers[k as usize].push(p as u32);
            }
        }
        Some(AuthorLinks {
            paper_authors,
            author_papers,
        })
    }

    /// Normalized author feedback for paper scores `x`.
    fn feedback(&self, x: &[f64]) -> Vec<f64> {
        let mut author = vec![0.0; self.author_papers.len()];
        for (p, list) in self.paper_authors.iter().enumerate() {
            if list.is_empty() {
                continue;
            }
            let share = x[p] / list.len() as f64;
            for &k in list {
                author[k as usize] += share;
            }
        }
        let mut h: Vec<f64> = self
            .paper_authors
            .iter()
            .map(|list| {
                list.iter()
                    .map(|&k| author[k as usize] / self.author_papers[k as usize].len() as f64)
                    .sum()
            })
            .collect();
        let total: f64 = h.iter().sum();
        if total > 0.0 {
            h.iter_mut().for_each(|v| *v /= total);
        }
        h
    }
}

fn recency(g: &CitationGraph, rho: f64) -> Vec<f64> {
    let newest = g.newest_year().unwrap_or(0);
    let raw: Vec<f64> = (0..g.paper_count())
        .map(|i| (rho * f64::from(newest - g.year(i))).exp())
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|r| r / total).collect()
}

/// FutureRank iteration; unconverged runs are returned with
/// `converged == false`.
pub fn futurerank_trace(g: &CitationGraph, params: &FutureRankParams, opts: &SolveOptions) -> Result<Solution> {
    params.validate()?;
    opts.validate()?;
    let n = g.paper_count();
    if n == 0 {
        return Err(Error::TooFewPapers(0, 1));
    }
    let links = if params.beta > 0.0 {
        Some(AuthorLinks::build(g).ok_or(Error::MissingAuthors)?)
    } else {
        None
    };
    let time = if params.gamma > 0.0 {
        recency(g, params.rho)
    } else {
        vec![0.0; n]
    };
    let base = params.uniform_share() / n as f64;
    let view = TransitionView::new(g);

    let mut x = vec![1.0 / n as f64; n];
    let mut sx = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut residuals = Vec::new();
    let mut converged = false;
    for _ in 0..opts.max_iter {
        view.matvec_into(&x, &mut sx, opts.exec)?;
        let h = links.as_ref().map(|l| l.feedback(&x));
        par::fill(&mut next, opts.exec, |i| {
            let author = h.as_ref().map_or(0.0, |h| params.beta * h[i]);
            params.alpha * sx[i] + author + params.gamma * time[i] + base
        });
        let total: f64 = next.iter().sum();
        if total > 0.0 {
            next.iter_mut().for_each(|v| *v /= total);
        }
        let residual = par::sum(n, opts.exec, |i| (next[i] - x[i]).abs());
        std::mem::swap(&mut x, &mut next);
        residuals.push(residual);
        if residual < opts.tol {
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

pub fn futurerank(g: &CitationGraph, params: &FutureRankParams, opts: &SolveOptions) -> Result<Solution> {
    futurerank_trace(g, params, opts)?.require_converged()
}
