use std::fmt;
use std::str::FromStr;

use super::CitationGraph;
use crate::error::{Error, Result};
use crate::walkcore::ScoreVector;

/// Ratio of future-view to current-view paper counts, held as an exact
/// fraction so that `floor(ratio * n)` does not depend on binary rounding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TestRatio {
    num: u64,
    den: u64,
}

impl TestRatio {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidParameter("test ratio denominator is zero".into()));
        }
        let r = TestRatio { num, den };
        if num < den || num > 2 * den {
            return Err(Error::RatioOutOfRange(r.value()));
        }
        Ok(r)
    }

    /// Nearest fraction with denominator 10^9.
    pub fn from_f64(x: f64) -> Result<Self> {
        if !x.is_finite() || !(1.0..=2.0).contains(&x) {
            return Err(Error::RatioOutOfRange(x));
        }
        let den = 1_000_000_000u64;
        Self::new((x * den as f64).round() as u64, den)
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `floor(ratio * n)`.
    pub fn scale(&self, n: usize) -> usize {
        ((n as u128 * self.num as u128) / self.den as u128) as usize
    }
}

impl FromStr for TestRatio {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidParameter(format!("unparseable test ratio `{s}`"));
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if int.is_empty() || !int.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        if !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 12 {
            return Err(bad());
        }
        let den = 10u64.pow(frac.len() as u32);
        let num = int.parse::<u64>().map_err(|_| bad())?
            .checked_mul(den)
            .and_then(|v| v.checked_add(if frac.is_empty() { 0 } else { frac.parse::<u64>().ok()? }))
            .ok_or_else(bad)?;
        Self::new(num, den).map_err(|e| match e {
            Error::RatioOutOfRange(_) => Error::RatioOutOfRange(num as f64 / den as f64),
            other => other,
        })
    }
}

impl fmt::Display for TestRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// A (current, future) pair of prefix views plus the short-term-impact
/// ground truth for the current papers.
///
/// `current` is an owned copy of the induced prefix subgraph; a ranking
/// method handed `&split.current` has no way to reach future edges.
#[derive(Debug, Clone)]
pub struct SplitView {
    pub current: CitationGraph,
    pub future: CitationGraph,
    pub test_ratio: TestRatio,
    pub sti: ScoreVector,
}

impl SplitView {
    pub fn n_current(&self) -> usize {
        self.current.paper_count()
    }

    pub fn n_future(&self) -> usize {
        self.future.paper_count()
    }
}

/// Splits `g` into the oldest half (current) and the oldest
/// `floor(ratio * half)` papers (future), and counts for every current paper
/// the citations it receives from future-only papers.
pub fn temporal_split(g: &CitationGraph, test_ratio: TestRatio) -> Result<SplitView> {
    let n = g.paper_count();
    if n < 2 {
        return Err(Error::TooFewPapers(n, 2));
    }
    let n_current = n / 2;
    let n_future = test_ratio.scale(n_current).min(n);
    let current = g.prefix(n_current);
    let future = g.prefix(n_future);
    let sti: Vec<f64> = (0..n_current)
        .map(|i| {
            future
                .citations(i)
                .iter()
                .filter(|&&j| (j as usize) >= n_current)
                .count() as f64
        })
        .collect();
    Ok(SplitView {
        current,
        future,
        test_ratio,
        sti: ScoreVector::raw(sti),
    })
}
