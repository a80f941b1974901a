//! Node contraction: the PageRank of the oldest `n` papers of a network
//! whose remaining `m` papers are never cited equals, up to the scale
//! `|ů|`, the PageRank of the prefix network under the adjusted teleport
//! vector `ů = u[..n] + alpha * Σ_p u_p S[..n, p]`.

use super::{pagerank, ScoreVector, SolveOptions, TeleportVector, TransitionView};
use crate::error::{Error, Result};

/// Adjusted teleport vector over the prefix and its total mass.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjustedTeleport {
    pub values: Vec<f64>,
    pub mass: f64,
}

fn check_contractible(s_full: &TransitionView<'_>, n: usize) -> Result<()> {
    let g = s_full.graph();
    let total = g.paper_count();
    if n == 0 || n > total {
        return Err(Error::ContractionPreconditionViolated(format!(
            "prefix size {n} outside 1..={total}"
        )));
    }
    if let Some(p) = (n..total).find(|&p| g.in_degree(p) > 0) {
        return Err(Error::ContractionPreconditionViolated(format!(
            "paper `{}` beyond the prefix is cited",
            g.id(p)
        )));
    }
    if !s_full.dangling_set().is_empty() && s_full.dangling_support() != n && n != total {
        return Err(Error::ContractionPreconditionViolated(format!(
            "dangling mass spreads over {} papers, expected the prefix of {n}",
            s_full.dangling_support()
        )));
    }
    Ok(())
}

pub fn adjusted_teleport(
    s_full: &TransitionView<'_>,
    u_full: &TeleportVector,
    alpha: f64,
    n: usize,
) -> Result<AdjustedTeleport> {
    let g = s_full.graph();
    if u_full.len() != g.paper_count() {
        return Err(Error::DimensionMismatch {
            expected: g.paper_count(),
            actual: u_full.len(),
        });
    }
    check_contractible(s_full, n)?;
    let u = u_full.values();
    let mut values = u[..n].to_vec();
    for p in n..g.paper_count() {
        let w = alpha * u[p];
        if w == 0.0 {
            continue;
        }
        let refs = g.references(p);
        if refs.is_empty() {
            let share = w / n as f64;
            values.iter_mut().for_each(|v| *v += share);
        } else {
            let share = w / refs.len() as f64;
            for &i in refs {
                values[i as usize] += share;
            }
        }
    }
    let mass = values.iter().sum();
    Ok(AdjustedTeleport { values, mass })
}

/// PageRank scores of the first `n` papers, computed on the prefix network
/// alone. The result is not normalized: it sums to `|ů|`.
pub fn contracted_pagerank(
    s_full: &TransitionView<'_>,
    u_full: &TeleportVector,
    alpha: f64,
    n: usize,
    opts: &SolveOptions,
) -> Result<ScoreVector> {
    let adjusted = adjusted_teleport(s_full, u_full, alpha, n)?;
    if adjusted.mass <= 0.0 {
        return Ok(ScoreVector::raw(vec![0.0; n]));
    }
    let prefix = s_full.graph().prefix(n);
    let view = TransitionView::new(&prefix);
    let teleport = TeleportVector::from_weights(adjusted.values)?;
    let sol = pagerank(&view, &teleport, alpha, opts)?;
    Ok(ScoreVector::raw(
        sol.scores
            .into_values()
            .into_iter()
            .map(|v| v * adjusted.mass)
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::tests::toy;
    use crate::corpus::CitationGraph;

    #[test]
    fn toy_adjusted_teleport() {
        let g = toy();
        let s = TransitionView::with_dangling_support(&g, 3).unwrap();
        let a = adjusted_teleport(&s, &TeleportVector::uniform(4), 0.5, 3).unwrap();
        assert_eq!(a.values, vec![0.25, 0.25, 0.375]);
        assert_eq!(a.mass, 0.875);
    }

    #[test]
    fn nothing_to_contract() {
        let g = toy();
        let s = TransitionView::new(&g);
        let u = TeleportVector::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let a = adjusted_teleport(&s, &u, 0.5, 4).unwrap();
        assert_eq!(a.values, u.values());
        assert!((a.mass - 1.0).abs() < 1e-15);
        let c = contracted_pagerank(&s, &u, 0.5, 4, &SolveOptions::default()).unwrap();
        let full = pagerank(&s, &u, 0.5, &SolveOptions::default()).unwrap();
        for (x, y) in c.values().iter().zip(full.scores.values()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_mass_future() {
        let g = toy();
        let s = TransitionView::with_dangling_support(&g, 3).unwrap();
        let u = TeleportVector::new(vec![0.2, 0.3, 0.5, 0.0]).unwrap();
        let a = adjusted_teleport(&s, &u, 0.85, 3).unwrap();
        assert_eq!(a.values, vec![0.2, 0.3, 0.5]);
    }

    #[test]
    fn toy_contraction_matches_full_run() {
        let g = toy();
        let s = TransitionView::with_dangling_support(&g, 3).unwrap();
        let u = TeleportVector::uniform(4);
        let opts = SolveOptions::default();
        let full = pagerank(&s, &u, 0.5, &opts).unwrap();
        let c = contracted_pagerank(&s, &u, 0.5, 3, &opts).unwrap();
        for (x, y) in c.values().iter().zip(&full.scores.values()[..3]) {
            assert!((x - y).abs() <= 1e-9);
        }
        assert_eq!(full.scores.values()[3], 0.125);
    }

    #[test]
    fn cited_future_paper_rejected() {
        let g = toy();
        let s = TransitionView::with_dangling_support(&g, 2).unwrap();
        let err = adjusted_teleport(&s, &TeleportVector::uniform(4), 0.5, 2).unwrap_err();
        assert!(matches!(err, Error::ContractionPreconditionViolated(_)));
    }

    #[test]
    fn dangling_support_must_match_prefix() {
        let g = toy();
        let s = TransitionView::new(&g);
        let err = adjusted_teleport(&s, &TeleportVector::uniform(4), 0.5, 3).unwrap_err();
        assert!(matches!(err, Error::ContractionPreconditionViolated(_)));
    }

    #[test]
    fn dangling_future_paper_spreads_over_prefix() {
        let g = CitationGraph::from_years(&[2000, 2001, 2002], &[(1, 0)]).unwrap();
        let s = TransitionView::with_dangling_support(&g, 2).unwrap();
        let a = adjusted_teleport(&s, &TeleportVector::uniform(3), 0.6, 2).unwrap();
        let third = 1.0 / 3.0;
        assert!((a.values[0] - (third + 0.6 * third / 2.0)).abs() < 1e-15);
        assert!((a.mass - (1.0 - 0.4 * third)).abs() < 1e-15);
    }
}
