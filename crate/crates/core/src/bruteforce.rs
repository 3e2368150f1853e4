//! Exhaustive ("brute force") KNN search.
//!
//! Each query computes its full distance row against the reference set,
//! then keeps the k smallest entries. Queries are independent, so rows are
//! spread over worker threads; each worker owns a disjoint slice of the
//! output and a disjoint slice of the scratch buffer.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metric::Metric;
use crate::neighbors::{Neighbor, NeighborTable, SearchOutput};
use crate::points::PointSet;
use crate::select::{check_k, select_into};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BfConfig {
    /// Maximum number of query rows whose distance rows are materialized
    /// at once.
    pub chunk_size: usize,
    /// Worker threads; 0 uses the ambient rayon pool.
    pub worker_count: usize,
    pub count_distance_evals: bool,
}

impl Default for BfConfig {
    fn default() -> Self {
        Self {
            chunk_size: 256,
            worker_count: 0,
            count_distance_evals: false,
        }
    }
}

impl BfConfig {
    pub fn counted() -> Self {
        Self {
            count_distance_evals: true,
            ..Self::default()
        }
    }

    pub fn with_workers(mut self, worker_count: usize) -> Self {
        self.worker_count = worker_count;
        self
    }

    pub fn with_chunk_size(mut self, chunk_size: usize) -> Self {
        self.chunk_size = chunk_size;
        self
    }
}

/// Runs `f` on a dedicated pool of `workers` threads, or on the ambient pool
/// when `workers` is 0.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(f))
}

pub fn bf_knn(
    queries: &PointSet,
    references: &PointSet,
    k: usize,
    metric: &Metric,
    config: &BfConfig,
) -> Result<SearchOutput> {
    queries.check_same_dim(references)?;
    check_k(k, references.len())?;
    if config.chunk_size == 0 {
        return Err(Error::InvalidArgument(
            "chunk_size must be at least 1".into(),
        ));
    }
    let qp = metric.prepare(queries)?;
    let rp = metric.prepare(references)?;
    let kernel = metric.kernel();
    let n = queries.len();
    let m = references.len();
    let chunk = config.chunk_size.min(n);
    let counter = AtomicU64::new(0);
    let counting = config.count_distance_evals;

    let mut entries = vec![Neighbor::default(); n * k];
    with_workers(config.worker_count, || {
        let mut scratch = vec![Neighbor::default(); chunk * m];
        for (c, out_chunk) in entries.chunks_mut(chunk * k).enumerate() {
            let first = c * chunk;
            let rows = out_chunk.len() / k;
            scratch[..rows * m]
                .par_chunks_mut(m)
                .zip(out_chunk.par_chunks_mut(k))
                .enumerate()
                .for_each(|(offset, (buf, out))| {
                    let q = qp.row(first + offset);
                    for (j, slot) in buf.iter_mut().enumerate() {
                        *slot = Neighbor::new(j, kernel.eval(q, rp.row(j)));
                    }
                    select_into(buf, out);
                    if counting {
                        counter.fetch_add(m as u64, Ordering::Relaxed);
                    }
                });
        }
    })?;

    Ok(SearchOutput {
        table: NeighborTable::from_flat(k, entries),
        distance_evals: counting.then(|| counter.into_inner()),
    })
}

/// Predicted operation counts of one exhaustive search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel {
    pub additions: u128,
    pub multiplications: u128,
    /// Comparison count of sorting every distance row, `n·m·log2(m)`.
    pub comparisons: f64,
}

/// Closed-form work estimate for `n` queries against `m` references in
/// dimension `d`: `2nmd` additions/subtractions, `nmd` multiplications and
/// `n·m·log2 m` comparisons. None of these depend on `k`.
pub fn bf_cost_model(n: usize, m: usize, d: usize, k: usize) -> Result<CostModel> {
    if n == 0 || m == 0 || d == 0 || k == 0 {
        return Err(Error::InvalidArgument(format!(
            "cost model inputs must be positive (n={n}, m={m}, d={d}, k={k})"
        )));
    }
    let nmd = n as u128 * m as u128 * d as u128;
    Ok(CostModel {
        additions: 2 * nmd,
        multiplications: nmd,
        comparisons: n as f64 * m as f64 * (m as f64).log2(),
    })
}
