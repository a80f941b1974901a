//! Citation corpus: temporally ordered papers, citation edges, temporal
//! splits and the short-term-impact ground truth.
//!
//! Papers are stored in publication order. Index `i < j` implies
//! `time(i) <= time(j)`; equal times are ordered by external ID (numeric IDs
//! by value, before any non-numeric ID). Edges are kept in compressed sparse
//! form in both directions: `references(j)` lists the papers `j` cites and
//! `citations(i)` lists the papers citing `i`.

mod load;
mod split;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::Arc;

pub use load::{load_graph, parse_edges, parse_metadata, write_graph, PaperRecord};
pub use split::{temporal_split, SplitView, TestRatio};

use crate::error::{Error, Result};

/// Publication time of a paper.
///
/// `day` is a day ordinal (days since 1970-01-01). Year-only records are
/// placed on January 1st and flagged as not exact, so they never compare as
/// "earlier" than a dated paper of the same year.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PubTime {
    pub year: i32,
    pub day: i64,
    pub exact: bool,
}

impl PubTime {
    pub fn from_year(year: i32) -> Self {
        let day = chrono::NaiveDate::from_ymd_opt(year, 1, 1)
            .map(|d| days_since_epoch(&d))
            .unwrap_or(i64::from(year) * 365);
        PubTime {
            year,
            day,
            exact: false,
        }
    }

    pub fn from_date(date: chrono::NaiveDate) -> Self {
        use chrono::Datelike;
        PubTime {
            year: date.year(),
            day: days_since_epoch(&date),
            exact: true,
        }
    }

    /// True when a paper published at `self` cannot cite one published at
    /// `cited`.
    pub fn predates(&self, cited: &PubTime) -> bool {
        if self.exact && cited.exact {
            self.day < cited.day
        } else {
            self.year < cited.year
        }
    }
}

fn days_since_epoch(d: &chrono::NaiveDate) -> i64 {
    let epoch = chrono::NaiveDate::from_ymd_opt(1970, 1, 1).expect("valid epoch");
    d.signed_duration_since(epoch).num_days()
}

/// Ordering key for opaque paper IDs: numeric IDs by value, then text.
pub(crate) fn compare_ids(a: &str, b: &str) -> Ordering {
    match (a.parse::<u64>(), b.parse::<u64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        (Err(_), Err(_)) => a.cmp(b),
    }
}

/// Counters collected while assembling a graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadStats {
    pub edges_kept: usize,
    pub impossible_dropped: usize,
    pub self_citations_dropped: usize,
    pub duplicates_dropped: usize,
}

/// Paper-author incidence.
#[derive(Debug, Clone, PartialEq)]
pub struct Authorship {
    names: Arc<Vec<String>>,
    by_paper: Vec<Vec<u32>>,
}

impl Authorship {
    pub fn author_count(&self) -> usize {
        self.names.len()
    }

    pub fn authors_of(&self, paper: usize) -> &[u32] {
        &self.by_paper[paper]
    }

    pub fn author_name(&self, author: usize) -> &str {
        &self.names[author]
    }
}

/// Immutable citation network in temporal order.
#[derive(Debug, Clone, PartialEq)]
pub struct CitationGraph {
    ids: Vec<String>,
    times: Vec<PubTime>,
    out_offsets: Vec<usize>,
    out_targets: Vec<u32>,
    in_offsets: Vec<usize>,
    in_sources: Vec<u32>,
    authors: Option<Authorship>,
}

impl CitationGraph {
    /// Builds a graph from papers given as year + external ID and edges given
    /// as `(citing, cited)` positions into `years`. IDs are `1..=n` in input
    /// order.
    pub fn from_years(years: &[i32], edges: &[(usize, usize)]) -> Result<Self> {
        let ids = (1..=years.len()).map(|i| i.to_string()).collect();
        let times = years.iter().map(|&y| PubTime::from_year(y)).collect();
        Self::assemble(ids, times, None, edges).map(|(g, _)| g)
    }

    /// Like [`CitationGraph::from_years`] with per-paper author labels.
    pub fn from_years_with_authors(
        years: &[i32],
        edges: &[(usize, usize)],
        authors: &[Vec<&str>],
    ) -> Result<Self> {
        if authors.len() != years.len() {
            return Err(Error::DimensionMismatch {
                expected: years.len(),
                actual: authors.len(),
            });
        }
        let ids = (1..=years.len()).map(|i| i.to_string()).collect();
        let times = years.iter().map(|&y| PubTime::from_year(y)).collect();
        let owned: Vec<Vec<String>> = authors
            .iter()
            .map(|a| a.iter().map(|s| s.to_string()).collect())
            .collect();
        Self::assemble(ids, times, Some(owned), edges).map(|(g, _)| g)
    }

    /// Assembles a graph from unordered inputs.
    ///
    /// Papers are sorted into temporal order; self-citations, duplicate edges
    /// and citations to papers published after the citing paper are dropped
    /// and counted.
    pub fn assemble(
        ids: Vec<String>,
        times: Vec<PubTime>,
        authors: Option<Vec<Vec<String>>>,
        edges: &[(usize, usize)],
    ) -> Result<(Self, LoadStats)> {
        let n = ids.len();
        if times.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: times.len(),
            });
        }
        if n > u32::MAX as usize {
            return Err(Error::InvalidParameter("too many papers".into()));
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            times[a]
                .day
                .cmp(&times[b].day)
                .then_with(|| compare_ids(&ids[a], &ids[b]))
        });
        let mut rank = vec![0u32; n];
        for (new, &old) in order.iter().enumerate() {
            rank[old] = new as u32;
        }

        let mut stats = LoadStats::default();
        let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(edges.len());
        for &(citing, cited) in edges {
            if citing >= n || cited >= n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: citing.max(cited) + 1,
                });
            }
            if citing == cited {
                stats.self_citations_dropped += 1;
                continue;
            }
            if times[citing].predates(&times[cited]) {
                stats.impossible_dropped += 1;
                continue;
            }
            pairs.push((rank[citing], rank[cited]));
        }
        pairs.sort_unstable();
        let before = pairs.len();
        pairs.dedup();
        stats.duplicates_dropped = before - pairs.len();
        stats.edges_kept = pairs.len();
        if stats.impossible_dropped > 0 {
            log::warn!(
                "dropped {} citations whose citing paper predates the cited paper",
                stats.impossible_dropped
            );
        }

        let sorted_ids: Vec<String> = order.iter().map(|&o| ids[o].clone()).collect();
        let sorted_times: Vec<PubTime> = order.iter().map(|&o| times[o]).collect();
        let authorship = authors.map(|lists| {
            let mut index: HashMap<String, u32> = HashMap::new();
            let mut names = Vec::new();
            let by_paper = order
                .iter()
                .map(|&o| {
                    let mut ids: Vec<u32> = lists[o]
                        .iter()
                        .map(|name| {
                            *index.entry(name.clone()).or_insert_with(|| {
                                names.push(name.clone());
                                (names.len() - 1) as u32
                            })
                        })
                        .collect();
                    ids.sort_unstable();
                    ids.dedup();
                    ids
                })
                .collect();
            Authorship {
                names: Arc::new(names),
                by_paper,
            }
        });

        Ok((
            Self::from_sorted_parts(sorted_ids, sorted_times, authorship, &pairs),
            stats,
        ))
    }

    /// `pairs` must be sorted by citing index, then cited index, and free of
    /// duplicates and self-loops.
    fn from_sorted_parts(
        ids: Vec<String>,
        times: Vec<PubTime>,
        authors: Option<Authorship>,
        pairs: &[(u32, u32)],
    ) -> Self {
        let n = ids.len();
        let mut out_offsets = vec![0usize; n + 1];
        let mut in_offsets = vec![0usize; n + 1];
        for &(j, i) in pairs {
            out_offsets[j as usize + 1] += 1;
            in_offsets[i as usize + 1] += 1;
        }
        for k in 0..n {
            out_offsets[k + 1] += out_offsets[k];
            in_offsets[k + 1] += in_offsets[k];
        }
        let out_targets: Vec<u32> = pairs.iter().map(|&(_, i)| i).collect();
        let mut in_sources = vec![0u32; pairs.len()];
        let mut cursor = in_offsets.clone();
        // pairs are sorted by citing index, so each in-list comes out sorted
        for &(j, i) in pairs {
            in_sources[cursor[i as usize]] = j;
            cursor[i as usize] += 1;
        }
        CitationGraph {
            ids,
            times,
            out_offsets,
            out_targets,
            in_offsets,
            in_sources,
            authors,
        }
    }

    pub fn paper_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out_targets.len()
    }

    pub fn id(&self, paper: usize) -> &str {
        &self.ids[paper]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn time(&self, paper: usize) -> PubTime {
        self.times[paper]
    }

    pub fn year(&self, paper: usize) -> i32 {
        self.times[paper].year
    }

    /// Year of the newest paper, `None` for an empty graph.
    pub fn newest_year(&self) -> Option<i32> {
        self.times.iter().map(|t| t.year).max()
    }

    /// Papers cited by `paper`, ascending.
    pub fn references(&self, paper: usize) -> &[u32] {
        &self.out_targets[self.out_offsets[paper]..self.out_offsets[paper + 1]]
    }

    /// Papers citing `paper`, ascending.
    pub fn citations(&self, paper: usize) -> &[u32] {
        &self.in_sources[self.in_offsets[paper]..self.in_offsets[paper + 1]]
    }

    pub fn out_degree(&self, paper: usize) -> usize {
        self.out_offsets[paper + 1] - self.out_offsets[paper]
    }

    pub fn in_degree(&self, paper: usize) -> usize {
        self.in_offsets[paper + 1] - self.in_offsets[paper]
    }

    /// Iterates over all `(citing, cited)` edges.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.paper_count())
            .flat_map(move |j| self.references(j).iter().map(move |&i| (j, i as usize)))
    }

    pub fn authors(&self) -> Option<&Authorship> {
        self.authors.as_ref()
    }

    /// Internal index of an external ID.
    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    /// The induced subgraph over the oldest `n` papers.
    pub fn prefix(&self, n: usize) -> CitationGraph {
        let n = n.min(self.paper_count());
        let pairs: Vec<(u32, u32)> = (0..n)
            .flat_map(|j| {
                self.references(j)
                    .iter()
                    .filter(move |&&i| (i as usize) < n)
                    .map(move |&i| (j as u32, i))
            })
            .collect();
        let authors = self.authors.as_ref().map(|a| Authorship {
            names: Arc::clone(&a.names),
            by_paper: a.by_paper[..n].to_vec(),
        });
        Self::from_sorted_parts(
            self.ids[..n].to_vec(),
            self.times[..n].to_vec(),
            authors,
            &pairs,
        )
    }
}

/// Empirical distribution of citation ages (citing year minus cited year)
/// over ages `0..=max_age`; older citations are discarded.
pub fn citation_age_distribution(g: &CitationGraph, max_age: usize) -> Result<Vec<f64>> {
    let mut counts = vec![0u64; max_age + 1];
    let mut total = 0u64;
    for (j, i) in g.edges() {
        let age = i64::from(g.year(j)) - i64::from(g.year(i));
        if age >= 0 && (age as usize) <= max_age {
            counts[age as usize] += 1;
            total += 1;
        }
    }
    if total == 0 {
        return Err(Error::EmptyGraph);
    }
    Ok(counts
        .into_iter()
        .map(|c| c as f64 / total as f64)
        .collect())
}
