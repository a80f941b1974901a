#![allow(dead_code)]

use impactrank::corpus::CitationGraph;
use impactrank::synth::{citation_network, NetworkSpec};

pub fn random_dag(n: usize, seed: u64) -> CitationGraph {
    citation_network(&NetworkSpec::small(n), seed)
}

pub fn linf(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Dense copy of the column-stochastic citation matrix, built from the
/// edge list alone.
pub fn column_stochastic(g: &CitationGraph) -> Vec<Vec<f64>> {
    let n = g.paper_count();
    let mut s = vec![vec![0.0; n]; n];
    for j in 0..n {
        let refs = g.references(j);
        if refs.is_empty() {
            for row in s.iter_mut() {
                row[j] = 1.0 / n as f64;
            }
        } else {
            for &i in refs {
                s[i as usize][j] = 1.0 / refs.len() as f64;
            }
        }
    }
    s
}
