//! Replication orchestration. Each replication owns its stream, and results
//! come back in index order, so the thread count only affects wall time.

use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

use exctime_core::{derive_stream, RngStream};

use crate::error::{Error, Result};

/// Stream families, one per experiment component, kept disjoint by the
/// high bits of the stream id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Family {
    Simulate = 1,
    Route = 2,
    Subordination = 3,
    Poisson = 4,
    Limits = 5,
    Oracle = 6,
}

/// Stream for replication `r` of `family`, sub-indexed by `slot` (for
/// example the position in the `λ` grid).
pub fn stream(seed: u64, family: Family, slot: u64, r: u64) -> RngStream {
    debug_assert!(slot < 1 << 16 && r < 1 << 40);
    derive_stream(seed, ((family as u64) << 56) | (slot << 40) | r)
}

pub fn pool(threads: Option<usize>) -> Result<ThreadPool> {
    let mut builder = ThreadPoolBuilder::new();
    if let Some(k) = threads {
        if k == 0 {
            return Err(Error::Config("thread count must be positive".into()));
        }
        builder = builder.num_threads(k);
    }
    builder.build().map_err(|e| Error::Config(e.to_string()))
}

/// Runs `f(0..n)` on the pool and returns the results in index order.
pub fn replicate<R, F>(pool: &ThreadPool, n: usize, f: F) -> Result<Vec<R>>
where
    R: Send,
    F: Fn(u64) -> exctime_core::Result<R> + Sync,
{
    pool.install(|| {
        (0..n as u64)
            .into_par_iter()
            .map(&f)
            .collect::<exctime_core::Result<Vec<R>>>()
    })
    .map_err(Error::from)
}
