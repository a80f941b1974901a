//! Data-parallel helpers with a sequential fallback.
//!
//! Work is cut into fixed-size chunks and reductions combine per-chunk
//! partials in chunk order, so both execution modes produce bit-identical
//! results regardless of thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

const CHUNK: usize = 4096;

/// How row-wise kernels are executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    /// Uses the rayon pool when the `parallel` feature is enabled, otherwise
    /// identical to `Sequential`.
    #[default]
    Parallel,
}

#[cfg(feature = "parallel")]
impl Exec {
    fn is_parallel(self, len: usize) -> bool {
        self == Exec::Parallel && len > CHUNK
    }
}

/// `out[i] = f(i)` for every row.
pub fn fill<F>(out: &mut [f64], exec: Exec, f: F)
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel(out.len()) {
        out.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
            let base = c * CHUNK;
            for (k, o) in chunk.iter_mut().enumerate() {
                *o = f(base + k);
            }
        });
        return;
    }
    let _ = exec;
    for (i, o) in out.iter_mut().enumerate() {
        *o = f(i);
    }
}

/// `Σ f(i)` over `0..len`, summed per chunk then across chunks.
pub fn sum<F>(len: usize, exec: Exec, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let chunks = len.div_ceil(CHUNK);
    let partial = |c: usize| {
        let end = ((c + 1) * CHUNK).min(len);
        (c * CHUNK..end).map(&f).sum::<f64>()
    };
    #[cfg(feature = "parallel")]
    if exec.is_parallel(len) {
        let partials: Vec<f64> = (0..chunks).into_par_iter().map(partial).collect();
        return partials.iter().sum();
    }
    let _ = exec;
    (0..chunks).map(partial).sum()
}

/// Maps `f` over `items` preserving order.
pub fn map_ordered<T, R, F>(items: &[T], exec: Exec, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Exec::Parallel {
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Runs `op` inside a pool of `jobs` threads (`None` = global pool).
pub fn with_jobs<R: Send, F: FnOnce() -> R + Send>(jobs: Option<usize>, op: F) -> R {
    #[cfg(feature = "parallel")]
    if let Some(j) = jobs {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build() {
            return pool.install(op);
        }
    }
    let _ = jobs;
    op()
}
