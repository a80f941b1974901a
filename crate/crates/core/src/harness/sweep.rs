use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::attrank::{AttRankParams, AttentionMode};
use crate::baselines::{Baseline, FutureRankParams};
use crate::corpus::SplitView;
use crate::error::{Error, Result};
use crate::par::{self, Exec};

use super::{evaluate, EvalConfig, Method};

const GRID_DECIMALS: f64 = 1e10;
const CONSTRAINT_SLACK: f64 = 1e-9;

fn snap(v: f64) -> f64 {
    (v * GRID_DECIMALS).round() / GRID_DECIMALS
}

/// One swept parameter: `start, start + step, ...` up to `stop` inclusive.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Axis {
    pub fn new(name: &str, start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidParameter(format!("{name}: step must be positive, got {step}")));
        }
        if !(start <= stop) {
            return Err(Error::InvalidParameter(format!("{name}: min {start} exceeds max {stop}")));
        }
        Ok(Axis {
            name: name.to_string(),
            start,
            stop,
            step,
        })
    }

    /// Parses `min:max:step`, or a single value.
    pub fn parse(name: &str, spec: &str) -> Result<Self> {
        let nums = spec
            .split(':')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidParameter(format!("{name}: bad number `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        match nums[..] {
            [v] => Axis::new(name, v, v, 1.0),
            [a, b, s] => Axis::new(name, a, b, s),
            _ => Err(Error::InvalidParameter(format!("{name}: expected min:max:step, got `{spec}`"))),
        }
    }

    /// Grid points, computed as `start + i * step` and rounded to ten
    /// decimals so that `0.1 * 3` lands on `0.3`.
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| snap(self.start + i as f64 * self.step)).collect()
    }
}

/// Restriction on which grid points are kept.
#[derive(Debug, Clone, PartialEq)]
pub enum Constraint {
    None,
    /// The named axes sum to `total`.
    SumEquals(Vec<String>, f64),
    /// The named axes sum to at most `total`.
    SumAtMost(Vec<String>, f64),
}

/// A cartesian product of axes filtered by a constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub axes: Vec<Axis>,
    pub constraint: Constraint,
}

impl SweepGrid {
    pub fn new(axes: Vec<Axis>, constraint: Constraint) -> Result<Self> {
        let known = |n: &String| axes.iter().any(|a| &a.name == n);
        if let Constraint::SumEquals(names, _) | Constraint::SumAtMost(names, _) = &constraint {
            if let Some(bad) = names.iter().find(|n| !known(n)) {
                return Err(Error::InvalidParameter(format!("constraint names unknown axis `{bad}`")));
            }
        }
        Ok(SweepGrid { axes, constraint })
    }

    pub fn names(&self) -> Vec<&str> {
        self.axes.iter().map(|a| a.name.as_str()).collect()
    }

    /// Replaces the axis with the same name.
    pub fn with_axis(mut self, axis: Axis) -> Result<Self> {
        let slot = self
            .axes
            .iter_mut()
            .find(|a| a.name == axis.name)
            .ok_or_else(|| Error::InvalidParameter(format!("no axis named `{}`", axis.name)))?;
        *slot = axis;
        Ok(self)
    }

    fn admits(&self, cell: &[f64]) -> bool {
        let total = |names: &[String]| -> f64 {
            names
                .iter()
                .map(|n| cell[self.axes.iter().position(|a| &a.name == n).unwrap()])
                .sum()
        };
        match &self.constraint {
            Constraint::None => true,
            Constraint::SumEquals(names, t) => (total(names) - t).abs() <= CONSTRAINT_SLACK,
            Constraint::SumAtMost(names, t) => total(names) <= t + CONSTRAINT_SLACK,
        }
    }

    /// All admitted cells, first axis varying slowest.
    pub fn cells(&self) -> Vec<Vec<f64>> {
        let values: Vec<Vec<f64>> = self.axes.iter().map(Axis::values).collect();
        let mut out = Vec::new();
        let mut cell = Vec::with_capacity(values.len());
        fn walk(values: &[Vec<f64>], cell: &mut Vec<f64>, grid: &SweepGrid, out: &mut Vec<Vec<f64>>) {
            let depth = cell.len();
            if depth == values.len() {
                if grid.admits(cell) {
                    out.push(cell.clone());
                }
                return;
            }
            for &v in &values[depth] {
                cell.push(v);
                walk(values, cell, grid, out);
                cell.pop();
            }
        }
        walk(&values, &mut cell, self, &mut out);
        out
    }
}

/// Which family of methods a sweep instantiates from grid cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepMethod {
    AttRank { eta: f64, attention_mode: AttentionMode },
    PageRank,
    CiteRank,
    FutureRank,
    Ram,
    Ecm,
}

impl SweepMethod {
    pub fn name(&self) -> &'static str {
        match self {
            SweepMethod::AttRank { .. } => "attrank",
            SweepMethod::PageRank => "pagerank",
            SweepMethod::CiteRank => "citerank",
            SweepMethod::FutureRank => "futurerank",
            SweepMethod::Ram => "ram",
            SweepMethod::Ecm => "ecm",
        }
    }

    /// The published parameter space of the method.
    pub fn default_grid(&self) -> SweepGrid {
        let ax = |n: &str, a: f64, b: f64, s: f64| Axis::new(n, a, b, s).expect("static axis");
        let names = |ns: &[&str]| ns.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        let (axes, constraint) = match self {
            SweepMethod::AttRank { .. } => (
                vec![
                    ax("alpha", 0.0, 0.5, 0.1),
                    ax("beta", 0.0, 1.0, 0.1),
                    ax("gamma", 0.0, 0.9, 0.1),
                    ax("y", 1.0, 5.0, 1.0),
                ],
                Constraint::SumEquals(names(&["alpha", "beta", "gamma"]), 1.0),
            ),
            SweepMethod::PageRank => (vec![ax("alpha", 0.1, 0.9, 0.1)], Constraint::None),
            SweepMethod::CiteRank => (
                vec![ax("alpha", 0.1, 0.7, 0.2), ax("tau_dir", 2.0, 10.0, 2.0)],
                Constraint::None,
            ),
            SweepMethod::FutureRank => (
                vec![
                    ax("alpha", 0.1, 0.5, 0.1),
                    ax("beta", 0.0, 0.9, 0.1),
                    ax("gamma", 0.0, 0.9, 0.1),
                    ax("rho", -0.82, -0.42, 0.2),
                ],
                Constraint::SumAtMost(names(&["alpha", "beta", "gamma"]), 1.0),
            ),
            SweepMethod::Ram => (vec![ax("gamma", 0.1, 0.9, 0.1)], Constraint::None),
            SweepMethod::Ecm => (
                vec![ax("alpha", 0.1, 0.5, 0.1), ax("gamma", 0.1, 0.5, 0.1)],
                Constraint::None,
            ),
        };
        SweepGrid { axes, constraint }
    }

    /// Builds the method for one cell of a grid with axes `names`.
    pub fn method_for(&self, names: &[&str], cell: &[f64]) -> Result<Method> {
        let get = |key: &str| -> Result<f64> {
            names
                .iter()
                .position(|n| *n == key)
                .map(|i| cell[i])
                .ok_or_else(|| Error::InvalidParameter(format!("{} sweep needs a `{key}` axis", self.name())))
        };
        let method = match *self {
            SweepMethod::AttRank { eta, attention_mode } => {
                let y = get("y")?;
                if y.fract() != 0.0 || y < 1.0 {
                    return Err(Error::InvalidParameter(format!("y must be a positive integer, got {y}")));
                }
                Method::AttRank(
                    AttRankParams::new(get("alpha")?, get("beta")?, get("gamma")?, eta, y as u32)?
                        .with_mode(attention_mode),
                )
            }
            SweepMethod::PageRank => Method::PageRank { alpha: get("alpha")? },
            SweepMethod::CiteRank => Method::Baseline(Baseline::CiteRank {
                alpha: get("alpha")?,
                tau_dir: get("tau_dir")?,
            }),
            SweepMethod::FutureRank => Method::Baseline(Baseline::FutureRank(FutureRankParams::new(
                get("alpha")?,
                get("beta")?,
                get("gamma")?,
                get("rho")?,
            )?)),
            SweepMethod::Ram => Method::Baseline(Baseline::Ram { gamma: get("gamma")? }),
            SweepMethod::Ecm => Method::Baseline(Baseline::Ecm {
                alpha: get("alpha")?,
                gamma: get("gamma")?,
            }),
        };
        if let Method::Baseline(b) = &method {
            b.validate()?;
        }
        Ok(method)
    }
}

/// The quantity a sweep maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Spearman,
    Ndcg(usize),
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Spearman => f.write_str("spearman"),
            Metric::Ndcg(k) => write!(f, "ndcg@{k}"),
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("unknown metric `{s}` (spearman or ndcg@K)"));
        match s {
            "spearman" => Ok(Metric::Spearman),
            _ => {
                let k = s.strip_prefix("ndcg@").ok_or_else(bad)?;
                match k.parse::<usize>() {
                    Ok(k) if k > 0 => Ok(Metric::Ndcg(k)),
                    _ => Err(bad()),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub cell: Vec<f64>,
    /// NaN when the cell failed.
    pub value: f64,
    pub iterations: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub method: String,
    pub axes: Vec<String>,
    pub metric: Metric,
    pub rows: Vec<SweepRow>,
    /// Index of the first row with the largest value; `None` if every
    /// cell failed.
    pub best: Option<usize>,
}

impl SweepResult {
    pub fn best_row(&self) -> Option<&SweepRow> {
        self.best.map(|i| &self.rows[i])
    }

    /// Long-format table: the axis values, the metric name, its value and
    /// the error (empty on success).
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{},metric,value,error", self.axes.join(","))?;
        for row in &self.rows {
            for v in &row.cell {
                write!(w, "{v},")?;
            }
            let err = row
                .error
                .as_deref()
                .map(|e| e.replace(['\n', '\r'], " ").replace(',', ";"))
                .unwrap_or_default();
            writeln!(w, "{},{},{}", self.metric, row.value, err)?;
        }
        Ok(())
    }
}

fn argmax(rows: &[SweepRow]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, r) in rows.iter().enumerate() {
        if r.value.is_nan() {
            continue;
        }
        if best.is_none_or(|b| r.value > rows[b].value) {
            best = Some(i);
        }
    }
    best
}

/// Evaluates every cell of `grid` on `split`.
///
/// Cells run concurrently on at most `jobs` threads (all cores when
/// `None`); rows come back in grid order whatever the completion order.
/// A failing cell yields a NaN row carrying the error message.
pub fn sweep(
    method: &SweepMethod,
    grid: &SweepGrid,
    split: &SplitView,
    metric: Metric,
    cfg: &EvalConfig,
    jobs: Option<usize>,
) -> Result<SweepResult> {
    let cells = grid.cells();
    if cells.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let names = grid.names();
    let mut cfg = cfg.clone();
    if let Metric::Ndcg(k) = metric {
        cfg.ks = vec![k];
    } else {
        cfg.ks.clear();
    }
    let run_cell = |cell: &Vec<f64>| -> SweepRow {
        let outcome = method.method_for(&names, cell).and_then(|m| evaluate(&m, split, &cfg));
        match outcome {
            Ok(report) => {
                let value = match metric {
                    Metric::Spearman => report.spearman,
                    Metric::Ndcg(k) => report.ndcg.get(k).unwrap_or(f64::NAN),
                };
                SweepRow {
                    cell: cell.clone(),
                    value,
                    iterations: report.iterations,
                    error: None,
                }
            }
            Err(e) => SweepRow {
                cell: cell.clone(),
                value: f64::NAN,
                iterations: 0,
                error: Some(format!("{}: {e}", e.kind())),
            },
        }
    };
    let rows = par::with_jobs(jobs, || par::map_ordered(&cells, Exec::Parallel, run_cell));
    let best = argmax(&rows);
    Ok(SweepResult {
        method: method.name().to_string(),
        axes: names.iter().map(|s| s.to_string()).collect(),
        metric,
        rows,
        best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_values_are_clean() {
        let a = Axis::new("alpha", 0.0, 0.5, 0.1).unwrap();
        assert_eq!(a.values(), vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5]);
        let r = Axis::new("rho", -0.82, -0.42, 0.2).unwrap();
        assert_eq!(r.values(), vec![-0.82, -0.62, -0.42]);
        assert_eq!(Axis::parse("y", "3").unwrap().values(), vec![3.0]);
        assert!(Axis::new("a", 1.0, 0.0, 0.1).is_err());
        assert!(Axis::new("a", 0.0, 1.0, 0.0).is_err());
        assert!(Axis::parse("a", "0:1").is_err());
    }

    #[test]
    fn published_grid_sizes() {
        let attrank = SweepMethod::AttRank {
            eta: 0.0,
            attention_mode: AttentionMode::CountFraction,
        };
        assert_eq!(attrank.default_grid().cells().len(), 250);
        assert_eq!(SweepMethod::CiteRank.default_grid().cells().len(), 20);
        assert_eq!(SweepMethod::Ram.default_grid().cells().len(), 9);
        assert_eq!(SweepMethod::Ecm.default_grid().cells().len(), 25);
        assert_eq!(SweepMethod::FutureRank.default_grid().cells().len(), 555);
    }

    #[test]
    fn metric_names() {
        assert_eq!("ndcg@50".parse::<Metric>().unwrap(), Metric::Ndcg(50));
        assert_eq!(Metric::Ndcg(5).to_string(), "ndcg@5");
        assert!("ndcg@0".parse::<Metric>().is_err());
        assert!("tau".parse::<Metric>().is_err());
    }

    #[test]
    fn argmax_skips_nan_and_keeps_first() {
        let row = |v: f64| SweepRow {
            cell: vec![],
            value: v,
            iterations: 0,
            error: None,
        };
        assert_eq!(argmax(&[row(f64::NAN), row(0.5), row(0.7), row(0.7)]), Some(2));
        assert_eq!(argmax(&[row(f64::NAN)]), None);
    }
}
