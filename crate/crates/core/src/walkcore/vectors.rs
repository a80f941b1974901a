use std::cmp::Ordering;
use std::io::Write;

use crate::corpus::compare_ids;
use crate::error::{Error, Result};

const TELEPORT_SLACK: f64 = 1e-12;
const SCORE_SLACK: f64 = 1e-10;

/// Probability distribution used as a random-jump target.
#[derive(Debug, Clone, PartialEq)]
pub struct TeleportVector(Vec<f64>);

impl TeleportVector {
    /// Validates nonnegativity and unit mass (±1e-12).
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidDistribution("empty teleport vector".into()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidDistribution(format!("entry {bad} is not a probability")));
        }
        let mass: f64 = values.iter().sum();
        if (mass - 1.0).abs() > TELEPORT_SLACK {
            return Err(Error::InvalidDistribution(format!("mass {mass} != 1")));
        }
        Ok(TeleportVector(values))
    }

    pub fn uniform(n: usize) -> Self {
        TeleportVector(vec![1.0 / n as f64; n])
    }

    /// Normalizes nonnegative weights to unit mass.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if let Some(bad) = weights.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidDistribution(format!("weight {bad} is negative or not finite")));
        }
        let mass: f64 = weights.iter().sum();
        if mass <= 0.0 {
            return Err(Error::InvalidDistribution("weights have zero mass".into()));
        }
        Ok(TeleportVector(weights.into_iter().map(|w| w / mass).collect()))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Per-paper scores, optionally flagged as a distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    values: Vec<f64>,
    normalized: bool,
}

impl ScoreVector {
    pub fn raw(values: Vec<f64>) -> Self {
        ScoreVector {
            values,
            normalized: false,
        }
    }

    /// Wraps values that sum to 1 (±1e-10).
    pub fn distribution(values: Vec<f64>) -> Result<Self> {
        let mass: f64 = values.iter().sum();
        if (mass - 1.0).abs() > SCORE_SLACK {
            return Err(Error::InvalidDistribution(format!("score mass {mass} != 1")));
        }
        Ok(Self::distribution_unchecked(values))
    }

    pub(crate) fn distribution_unchecked(values: Vec<f64>) -> Self {
        ScoreVector {
            values,
            normalized: true,
        }
    }

    /// Divides by the total; a zero vector is returned unchanged and stays
    /// unnormalized.
    pub fn normalize(self) -> Self {
        let mass: f64 = self.values.iter().sum();
        if mass > 0.0 {
            ScoreVector {
                values: self.values.into_iter().map(|v| v / mass).collect(),
                normalized: true,
            }
        } else {
            self
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Writes `paper_id,score` rows by descending score, ties by ascending
    /// ID, with 17 significant digits.
    pub fn write_csv<W: Write>(&self, ids: &[String], mut out: W) -> Result<()> {
        if ids.len() != self.values.len() {
            return Err(Error::DimensionMismatch {
                expected: self.values.len(),
                actual: ids.len(),
            });
        }
        let mut order: Vec<usize> = (0..ids.len()).collect();
        order.sort_by(|&a, &b| {
            self.values[b]
                .total_cmp(&self.values[a])
                .then_with(|| compare_ids(&ids[a], &ids[b]))
                .then(Ordering::Equal)
        });
        writeln!(out, "paper_id,score")?;
        for p in order {
            writeln!(out, "{},{:.16e}", ids[p], self.values[p])?;
        }
        Ok(())
    }
}

/// Parses a score CSV produced by [`ScoreVector::write_csv`].
pub fn read_scores_csv(text: &str) -> Result<Vec<(String, f64)>> {
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if idx == 0 && line.starts_with("paper_id") {
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let (id, score) = line.rsplit_once(',').ok_or_else(|| Error::MalformedRecord {
            line: idx + 1,
            reason: "expected `paper_id,score`".into(),
        })?;
        let score = score.parse::<f64>().map_err(|_| Error::MalformedRecord {
            line: idx + 1,
            reason: format!("bad score `{score}`"),
        })?;
        rows.push((id.to_string(), score));
    }
    Ok(rows)
}
