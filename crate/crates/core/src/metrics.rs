//! Ranking agreement: Spearman's rho with tie-averaged ranks, nDCG@k with
//! linear gain, and the overlap between the top papers by future and by
//! recent citations.

use serde::ser::{Serialize, SerializeMap, Serializer};

use crate::attrank::{attention_weights, AttentionMode};
use crate::corpus::SplitView;
use crate::error::{Error, Result};

/// 1-based ranks, ties sharing the mean of the positions they occupy.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        while end + 1 < order.len() && values[order[end + 1]] == values[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end+1
        let rank = (start + end + 2) as f64 / 2.0;
        for &i in &order[start..=end] {
            ranks[i] = rank;
        }
        start = end + 1;
    }
    ranks
}

/// Spearman's rank correlation: Pearson correlation of average ranks.
///
/// With `exclude_zero_truth`, papers whose ground truth is zero are dropped
/// first.
pub fn spearman_rho(scores: &[f64], truth: &[f64], exclude_zero_truth: bool) -> Result<f64> {
    if scores.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            actual: scores.len(),
        });
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = scores
        .iter()
        .zip(truth)
        .filter(|(_, &t)| !exclude_zero_truth || t != 0.0)
        .map(|(&s, &t)| (s, t))
        .unzip();
    let n = xs.len();
    if n < 2 {
        return Err(Error::DegenerateInput(format!("need at least 2 papers, have {n}")));
    }
    let rx = average_ranks(&xs);
    let ry = average_ranks(&ys);
    let mean = (n as f64 + 1.0) / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        let (dx, dy) = (a - mean, b - mean);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::DegenerateInput("constant ranking".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Papers by descending score, ties by ascending index.
pub fn ranking_from_scores(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order
}

fn dcg(gains: impl Iterator<Item = f64>) -> f64 {
    gains
        .enumerate()
        .map(|(pos, g)| g / (pos as f64 + 2.0).log2())
        .sum()
}

/// nDCG over the first `k` entries of `ranking`, using `rel` as gain.
pub fn ndcg_at_k(ranking: &[usize], rel: &[f64], k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if let Some(bad) = rel.iter().find(|r| !(**r >= 0.0)) {
        return Err(Error::InvalidParameter(format!("relevance {bad} is negative")));
    }
    if let Some(&bad) = ranking.iter().find(|&&p| p >= rel.len()) {
        return Err(Error::DimensionMismatch {
            expected: rel.len(),
            actual: bad + 1,
        });
    }
    let mut ideal = rel.to_vec();
    ideal.sort_by(|a, b| b.total_cmp(a));
    let idcg = dcg(ideal.into_iter().take(k));
    if idcg == 0.0 {
        return Err(Error::ZeroIdeal);
    }
    let got = dcg(ranking.iter().take(k).map(|&p| rel[p]));
    Ok((got / idcg).min(1.0))
}

fn top_positive(values: &[f64], k: usize) -> Vec<usize> {
    ranking_from_scores(values)
        .into_iter()
        .take_while(|&p| values[p] > 0.0)
        .take(k)
        .collect()
}

/// Number of papers among the `top_k` by short-term impact that are also
/// among the `top_k` most cited during the last `y` years of the current
/// view. Only papers with a positive count qualify for either list.
pub fn recently_popular_overlap(split: &SplitView, y: u32, top_k: usize) -> usize {
    let Ok(recent) = attention_weights(&split.current, y, AttentionMode::CountFraction) else {
        return 0;
    };
    let by_sti = top_positive(split.sti.values(), top_k);
    let mut by_recent = top_positive(&recent, top_k);
    by_recent.sort_unstable();
    by_sti
        .iter()
        .filter(|p| by_recent.binary_search(p).is_ok())
        .count()
}

/// nDCG values keyed by cutoff, serialized as a JSON object in cutoff
/// order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NdcgTable(pub Vec<(usize, f64)>);

impl NdcgTable {
    pub fn get(&self, k: usize) -> Option<f64> {
        self.0.iter().find(|(c, _)| *c == k).map(|(_, v)| *v)
    }
}

impl Serialize for NdcgTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(&k.to_string(), v)?;
        }
        map.end()
    }
}

/// Outcome of evaluating one method configuration on one split.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct EvalReport {
    pub method: String,
    pub params: serde_json::Value,
    pub spearman: f64,
    pub ndcg: NdcgTable,
    pub n_evaluated: usize,
    pub exclude_zero_truth: bool,
    pub iterations: usize,
    pub runtime_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}
