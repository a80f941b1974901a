//! Comparison methods: CiteRank, FutureRank, Retained Adjacency Matrix and
//! Effective Contagion Matrix.
//!
//! Ages are measured in publication years from the newest paper in the
//! view. RAM and ECM weigh a citation by the age of the *citing* paper, so
//! old citations fade; CiteRank and FutureRank bias their random jumps
//! towards recently published papers.

mod futurerank;

pub use futurerank::{futurerank, futurerank_trace, FutureRankParams};

use serde::{Deserialize, Serialize};

use crate::corpus::CitationGraph;
use crate::error::{Error, Result};
use crate::par;
use crate::walkcore::{ScoreVector, Solution, SolveOptions, TransitionView};

/// A baseline method together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Baseline {
    CiteRank { alpha: f64, tau_dir: f64 },
    FutureRank(FutureRankParams),
    Ram { gamma: f64 },
    Ecm { alpha: f64, gamma: f64 },
}

impl Baseline {
    pub fn name(&self) -> &'static str {
        match self {
            Baseline::CiteRank { .. } => "citerank",
            Baseline::FutureRank(_) => "futurerank",
            Baseline::Ram { .. } => "ram",
            Baseline::Ecm { .. } => "ecm",
        }
    }

    /// Checks the parameter ranges the methods are defined on.
    pub fn validate(&self) -> Result<()> {
        let open_unit = |name: &str, v: f64| {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be in (0, 1), got {v}")))
            }
        };
        match *self {
            Baseline::CiteRank { alpha, tau_dir } => {
                open_unit("alpha", alpha)?;
                if !(tau_dir > 0.0 && tau_dir.is_finite()) {
                    return Err(Error::InvalidParameter(format!("tau_dir must be positive, got {tau_dir}")));
                }
                Ok(())
            }
            Baseline::FutureRank(p) => p.validate(),
            Baseline::Ram { gamma } => open_unit("gamma", gamma),
            Baseline::Ecm { alpha, gamma } => {
                open_unit("alpha", alpha)?;
                open_unit("gamma", gamma)
            }
        }
    }

    /// Runs the method on `g`. RAM and ECM report zero iterations and
    /// an empty residual trace unless they iterate.
    pub fn run(&self, g: &CitationGraph, opts: &SolveOptions) -> Result<Solution> {
        match *self {
            Baseline::CiteRank { alpha, tau_dir } => citerank(g, alpha, tau_dir, opts),
            Baseline::FutureRank(p) => futurerank(g, &p, opts),
            Baseline::Ram { gamma } => Ok(Solution {
                scores: ram(g, gamma)?,
                iterations: 0,
                residuals: Vec::new(),
                converged: true,
            }),
            Baseline::Ecm { alpha, gamma } => {
                let (raw, trace) = ecm_series(g, alpha, gamma, opts.tol, opts.max_iter)?;
                Ok(Solution {
                    scores: ScoreVector::raw(raw).normalize(),
                    iterations: trace.len(),
                    residuals: trace,
                    converged: true,
                })
            }
        }
    }
}

fn ages(g: &CitationGraph) -> Result<Vec<f64>> {
    let newest = g.newest_year().ok_or(Error::TooFewPapers(0, 1))?;
    Ok((0..g.paper_count())
        .map(|i| f64::from(newest - g.year(i)))
        .collect())
}

/// CiteRank start vector `rho_i ∝ exp(-age_i / tau_dir)`.
pub fn citerank_start(g: &CitationGraph, tau_dir: f64) -> Result<Vec<f64>> {
    let raw: Vec<f64> = ages(g)?.into_iter().map(|a| (-a / tau_dir).exp()).collect();
    let total: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|r| r / total).collect())
}

/// Like [`citerank`] but returns an unconverged series instead of an error.
pub fn citerank_trace(g: &CitationGraph, alpha: f64, tau_dir: f64, opts: &SolveOptions) -> Result<Solution> {
    opts.validate()?;
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!("alpha must be in [0, 1), got {alpha}")));
    }
    if !(tau_dir > 0.0 && tau_dir.is_finite()) {
        return Err(Error::InvalidParameter(format!("tau_dir must be positive, got {tau_dir}")));
    }
    let rho = citerank_start(g, tau_dir)?;
    let view = TransitionView::new(g);
    let n = rho.len();
    let mut traffic = rho.clone();
    let mut term = rho;
    let mut next = vec![0.0; n];
    let mut residuals = Vec::new();
    let mut converged = false;
    for _ in 0..opts.max_iter {
        view.matvec_into(&term, &mut next, opts.exec)?;
        next.iter_mut().for_each(|x| *x *= alpha);
        std::mem::swap(&mut term, &mut next);
        let size = par::sum(n, opts.exec, |i| term[i].abs());
        for (t, x) in traffic.iter_mut().zip(&term) {
            *t += x;
        }
        residuals.push(size);
        if size < opts.tol {
            converged = true;
            break;
        }
    }
    Ok(Solution {
        scores: ScoreVector::raw(traffic),
        iterations: residuals.len(),
        residuals,
        converged,
    })
}

/// CiteRank traffic `T = Σ_k alpha^k S^k rho`, truncated once a term's L1
/// size drops below `opts.tol`. Not normalized: `|T| = 1 / (1 - alpha)`.
pub fn citerank(g: &CitationGraph, alpha: f64, tau_dir: f64, opts: &SolveOptions) -> Result<Solution> {
    citerank_trace(g, alpha, tau_dir, opts)?.require_converged()
}

fn citation_weights(g: &CitationGraph, gamma: f64) -> Result<Vec<f64>> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidParameter(format!("gamma must be in (0, 1], got {gamma}")));
    }
    Ok(ages(g)?.into_iter().map(|a| gamma.powf(a)).collect())
}

/// `(R x)_i = Σ_{j cites i} w_j x_j`.
fn weighted_pull(g: &CitationGraph, w: &[f64], x: &[f64], out: &mut [f64]) {
    par::fill(out, par::Exec::default(), |i| {
        g.citations(i)
            .iter()
            .map(|&j| w[j as usize] * x[j as usize])
            .sum()
    });
}

/// Unnormalized RAM scores: each citation counts `gamma^age`, where age is
/// the number of years since the citing paper appeared.
pub fn ram_raw(g: &CitationGraph, gamma: f64) -> Result<Vec<f64>> {
    let w = citation_weights(g, gamma)?;
    let mut out = vec![0.0; g.paper_count()];
    weighted_pull(g, &w, &vec![1.0; g.paper_count()], &mut out);
    Ok(out)
}

/// RAM scores normalized to sum 1 (left at zero when nothing is cited).
pub fn ram(g: &CitationGraph, gamma: f64) -> Result<ScoreVector> {
    Ok(ScoreVector::raw(ram_raw(g, gamma)?).normalize())
}

/// Citation-chain series `Σ_{k>=1} alpha^(k-1) R^k 1` and the L1 size of
/// every term after the first. Stops when a term falls below `tol`
/// relative to the running sum.
fn ecm_series(
    g: &CitationGraph,
    alpha: f64,
    gamma: f64,
    tol: f64,
    max_k: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!("alpha must be in [0, 1], got {alpha}")));
    }
    let w = citation_weights(g, gamma)?;
    let n = g.paper_count();
    let mut score = ram_raw(g, gamma)?;
    let mut term = score.clone();
    let mut next = vec![0.0; n];
    let mut trace = Vec::new();
    for _ in 1..max_k.max(1) {
        weighted_pull(g, &w, &term, &mut next);
        next.iter_mut().for_each(|x| *x *= alpha);
        std::mem::swap(&mut term, &mut next);
        for (s, t) in score.iter_mut().zip(&term) {
            *s += t;
        }
        let size: f64 = term.iter().sum();
        let total: f64 = score.iter().sum();
        trace.push(size);
        if size == 0.0 || size < tol * total {
            return Ok((score, trace));
        }
    }
    Err(Error::NoConvergence {
        iterations: trace.len(),
        residual: trace.last().copied().unwrap_or(f64::NAN),
    })
}

/// Unnormalized ECM scores.
pub fn ecm_raw(g: &CitationGraph, alpha: f64, gamma: f64, tol: f64, max_k: usize) -> Result<Vec<f64>> {
    ecm_series(g, alpha, gamma, tol, max_k).map(|(s, _)| s)
}

/// ECM scores normalized to sum 1.
pub fn ecm(g: &CitationGraph, alpha: f64, gamma: f64, tol: f64, max_k: usize) -> Result<ScoreVector> {
    Ok(ScoreVector::raw(ecm_raw(g, alpha, gamma, tol, max_k)?).normalize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::tests::toy;
    use crate::walkcore::{dense_transition, DenseSystem};

    #[test]
    fn ram_toy() {
        assert_eq!(ram_raw(&toy(), 0.5).unwrap(), vec![0.75, 0.5, 1.0, 0.0]);
        let r = ram(&toy(), 0.5).unwrap();
        assert_eq!(r.values()[3], 0.0);
        assert!((r.sum() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ram_near_one_follows_citation_counts() {
        let g = toy();
        let r = ram_raw(&g, 0.999999).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                if g.in_degree(a) > g.in_degree(b) {
                    assert!(r[a] > r[b], "{a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn ecm_alpha_zero_is_ram() {
        let g = toy();
        let e = ecm(&g, 0.0, 0.3, 1e-12, 50).unwrap();
        let r = ram(&g, 0.3).unwrap();
        let bits = |v: &ScoreVector| v.values().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&e), bits(&r));
    }

    #[test]
    fn ecm_chain_counts() {
        let g = CitationGraph::from_years(&[2000, 2001, 2002, 2003], &[(1, 0), (2, 1), (3, 2)]).unwrap();
        let raw = ecm_raw(&g, 1.0, 1.0, 1e-12, 50).unwrap();
        assert_eq!(raw, vec![3.0, 2.0, 1.0, 0.0]);
    }

    #[test]
    fn ecm_cycle_without_decay_diverges() {
        // same-year papers citing each other form a cycle
        let g = CitationGraph::from_years(&[2000, 2000], &[(0, 1), (1, 0)]).unwrap();
        assert!(matches!(
            ecm_raw(&g, 1.0, 1.0, 1e-12, 30),
            Err(Error::NoConvergence { .. })
        ));
    }

    #[test]
    fn citerank_alpha_zero_is_start_vector() {
        let g = toy();
        let sol = citerank(&g, 0.0, 2.0, &SolveOptions::default()).unwrap();
        assert_eq!(sol.scores.values(), citerank_start(&g, 2.0).unwrap().as_slice());
    }

    #[test]
    fn citerank_toy_matches_dense() {
        let g = toy();
        let sol = citerank(&g, 0.5, 2.0, &SolveOptions::default()).unwrap();
        let rho = citerank_start(&g, 2.0).unwrap();
        let s = dense_transition(&TransitionView::new(&g)).unwrap();
        let exact = DenseSystem::new(&s, 0.5).unwrap().solve(&rho).unwrap();
        for (a, b) in sol.scores.values().iter().zip(&exact) {
            assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn citerank_same_year_uniform_start() {
        let g = CitationGraph::from_years(&[2000; 3], &[(1, 0), (2, 0)]).unwrap();
        assert_eq!(citerank_start(&g, 3.0).unwrap(), vec![1.0 / 3.0; 3]);
    }

    #[test]
    fn baseline_validation() {
        assert!(Baseline::CiteRank { alpha: 0.5, tau_dir: 2.0 }.validate().is_ok());
        assert!(Baseline::CiteRank { alpha: 1.0, tau_dir: 2.0 }.validate().is_err());
        assert!(Baseline::CiteRank { alpha: 0.5, tau_dir: 0.0 }.validate().is_err());
        assert!(Baseline::Ram { gamma: 0.0 }.validate().is_err());
        assert!(Baseline::Ecm { alpha: 0.1, gamma: 0.3 }.validate().is_ok());
        assert!(Baseline::Ecm { alpha: 0.0, gamma: 0.3 }.validate().is_err());
    }
}
