//! Seeded synthetic citation networks.
//!
//! All generators are deterministic in their seed. Papers are created in
//! temporal order and only cite earlier papers, so the output is a valid
//! citation DAG with no impossible citations.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::CitationGraph;

/// Growth model for [`citation_network`].
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSpec {
    pub papers: usize,
    pub first_year: i32,
    pub years: u32,
    /// Mean number of references of a citing paper.
    pub mean_refs: f64,
    /// Probability that a paper cites nothing.
    pub dangling_fraction: f64,
    /// Probability that a reference is drawn by preferential attachment
    /// (proportional to citations received plus one); otherwise it goes to
    /// a uniformly chosen paper among the `recent_window` newest.
    pub attachment: f64,
    pub recent_window: usize,
    /// Size of the author pool; `0` produces no author data.
    pub authors: usize,
    pub authors_per_paper: usize,
}

impl NetworkSpec {
    /// Small random DAG suited to dense-oracle comparisons.
    pub fn small(papers: usize) -> Self {
        NetworkSpec {
            papers,
            first_year: 2000,
            years: (papers as u32 / 4).clamp(1, 10),
            mean_refs: 2.5,
            dangling_fraction: 0.15,
            attachment: 0.5,
            recent_window: papers.max(1),
            authors: 0,
            authors_per_paper: 0,
        }
    }

    /// Large network grown by preferential attachment with a recency bias.
    pub fn preferential(papers: usize) -> Self {
        NetworkSpec {
            papers,
            first_year: 1992,
            years: 12,
            mean_refs: 8.0,
            dangling_fraction: 0.1,
            attachment: 0.7,
            recent_window: (papers / 6).max(1),
            authors: 0,
            authors_per_paper: 0,
        }
    }

    pub fn with_authors(mut self, pool: usize, per_paper: usize) -> Self {
        self.authors = pool;
        self.authors_per_paper = per_paper;
        self
    }
}

fn year_of(spec: &NetworkSpec, i: usize) -> i32 {
    let span = spec.years.max(1) as usize;
    spec.first_year + (i * span / spec.papers.max(1)) as i32
}

fn ref_count(rng: &mut ChaCha8Rng, mean: f64, available: usize) -> usize {
    // uniform on 1..=2*mean-1 has the requested mean
    let hi = (2.0 * mean - 1.0).round().max(1.0) as usize;
    rng.gen_range(1..=hi).min(available)
}

/// Grows a citation network according to `spec`.
pub fn citation_network(spec: &NetworkSpec, seed: u64) -> CitationGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.papers;
    let years: Vec<i32> = (0..n).map(|i| year_of(spec, i)).collect();
    let mut edges = Vec::new();
    // every paper once, plus once per citation received
    let mut urn: Vec<u32> = Vec::with_capacity(n * (1 + spec.mean_refs as usize));
    let mut picked = HashSet::new();
    for i in 0..n {
        if i > 0 && !rng.gen_bool(spec.dangling_fraction.clamp(0.0, 1.0)) {
            let want = ref_count(&mut rng, spec.mean_refs, i);
            picked.clear();
            let mut attempts = 0;
            while picked.len() < want && attempts < 20 * want {
                attempts += 1;
                let target = if rng.gen_bool(spec.attachment.clamp(0.0, 1.0)) {
                    urn[rng.gen_range(0..urn.len())] as usize
                } else {
                    let lo = i.saturating_sub(spec.recent_window.max(1));
                    rng.gen_range(lo..i)
                };
                if picked.insert(target) {
                    edges.push((i, target));
                    urn.push(target as u32);
                }
            }
        }
        urn.push(i as u32);
    }
    if spec.authors == 0 {
        return CitationGraph::from_years(&years, &edges).expect("generated graph is valid");
    }
    let names: Vec<String> = (0..spec.authors).map(|k| format!("a{k}")).collect();
    let authors: Vec<Vec<&str>> = (0..n)
        .map(|_| {
            let mut list: Vec<&str> = (0..spec.authors_per_paper.max(1))
                .map(|_| names[rng.gen_range(0..names.len())].as_str())
                .collect();
            list.sort_unstable();
            list.dedup();
            list
        })
        .collect();
    CitationGraph::from_years_with_authors(&years, &edges, &authors).expect("generated graph is valid")
}

/// A random network of `n + m` papers whose last `m` papers cite only the
/// first `n` and are never cited.
pub fn future_sink_instance(n: usize, m: usize, seed: u64) -> CitationGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = NetworkSpec::small(n);
    let mut years: Vec<i32> = (0..n).map(|i| year_of(&base, i)).collect();
    let last = years.last().copied().unwrap_or(base.first_year);
    years.extend((0..m).map(|k| last + 1 + (k * 2 / m.max(1)) as i32));
    let mut edges = Vec::new();
    for j in 1..n + m {
        let pool = j.min(n);
        if pool == 0 || rng.gen_bool(base.dangling_fraction) {
            continue;
        }
        let want = ref_count(&mut rng, base.mean_refs, pool);
        let mut seen = HashSet::new();
        while seen.len() < want {
            let i = rng.gen_range(0..pool);
            if seen.insert(i) {
                edges.push((j, i));
            }
        }
    }
    CitationGraph::from_years(&years, &edges).expect("generated graph is valid")
}

/// A corpus whose citation-age histogram is `round(scale * exp(eta * age))`
/// for ages `0..=max_age`.
///
/// `cohort` papers are published in the first year; citing papers in
/// year `first + age` each cite up to `cohort` of them.
pub fn exponential_age_corpus(eta: f64, max_age: usize, scale: f64, cohort: usize) -> CitationGraph {
    let first = 2000;
    let cohort = cohort.max(1);
    let mut years = vec![first; cohort];
    let mut edges = Vec::new();
    for age in 0..=max_age {
        let mut remaining = (scale * (eta * age as f64).exp()).round() as usize;
        while remaining > 0 {
            let citing = years.len();
            years.push(first + age as i32);
            let take = remaining.min(cohort);
            edges.extend((0..take).map(|i| (citing, i)));
            remaining -= take;
        }
    }
    CitationGraph::from_years(&years, &edges).expect("generated graph is valid")
}
