use nalgebra::{DMatrix, DVector, LU};

use super::{ScoreVector, TeleportVector, TransitionView};
use crate::error::{Error, Result};

/// Largest system the dense routines accept.
pub const DENSE_LIMIT: usize = 2000;

/// Explicit `S` built straight from the edge lists (not via `matvec`).
pub fn dense_transition(view: &TransitionView<'_>) -> Result<DMatrix<f64>> {
    let g = view.graph();
    let n = g.paper_count();
    if n > DENSE_LIMIT {
        return Err(Error::InvalidParameter(format!("dense matrix limited to {DENSE_LIMIT} papers")));
    }
    let support = view.dangling_support();
    let mut s = DMatrix::zeros(n, n);
    for j in 0..n {
        let refs = g.references(j);
        if refs.is_empty() {
            for i in 0..support {
                s[(i, j)] = 1.0 / support as f64;
            }
        } else {
            for &i in refs {
                s[(i as usize, j)] = 1.0 / refs.len() as f64;
            }
        }
    }
    Ok(s)
}

/// LU factorization of `I - alpha S`, reusable across right-hand sides.
pub struct DenseSystem {
    lu: LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    n: usize,
}

impl DenseSystem {
    pub fn new(s: &DMatrix<f64>, alpha: f64) -> Result<Self> {
        let n = s.nrows();
        if s.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: s.ncols(),
            });
        }
        if n > DENSE_LIMIT {
            return Err(Error::InvalidParameter(format!("dense solve limited to {DENSE_LIMIT} papers")));
        }
        let a = DMatrix::<f64>::identity(n, n) - s * alpha;
        Ok(DenseSystem { lu: a.lu(), n })
    }

    /// Solves `(I - alpha S) x = rhs`.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        if rhs.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: rhs.len(),
            });
        }
        let b = DVector::from_column_slice(rhs);
        self.lu
            .solve(&b)
            .map(|x| x.iter().copied().collect())
            .ok_or(Error::SingularSystem)
    }
}

/// Exact PageRank: solves `(I - alpha S) v = (1 - alpha) u` directly.
pub fn pagerank_dense_oracle(
    s: &DMatrix<f64>,
    u: &TeleportVector,
    alpha: f64,
) -> Result<ScoreVector> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!("alpha must be in [0, 1), got {alpha}")));
    }
    for (j, col) in s.column_iter().enumerate() {
        let mass: f64 = col.iter().sum();
        if (mass - 1.0).abs() > 1e-9 || col.iter().any(|&x| x < 0.0) {
            return Err(Error::InvalidDistribution(format!("column {j} is not stochastic")));
        }
    }
    let rhs: Vec<f64> = u.values().iter().map(|&p| (1.0 - alpha) * p).collect();
    let v = DenseSystem::new(s, alpha)?.solve(&rhs)?;
    Ok(ScoreVector::distribution_unchecked(v))
}
