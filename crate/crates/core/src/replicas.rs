//! Parallel execution of independent replicas.

use std::panic::{catch_unwind, AssertUnwindSafe};

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::rng::{derive_seed, seeded, SimRng};

/// Environment variable overriding the worker count.
pub const WORKERS_ENV: &str = "PATHPERC_WORKERS";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplicaFailure {
    pub index: usize,
    pub message: String,
}

/// Runs `f(i, rng_i)` for `i in 0..count`, where `rng_i` is seeded with
/// `derive_seed(base_seed, i)`. Results come back in index order; errors and
/// panics are captured per replica.
pub fn run_replicas<T, F>(count: usize, base_seed: u64, f: F) -> Vec<std::result::Result<T, ReplicaFailure>>
where
    T: Send,
    F: Fn(usize, SimRng) -> Result<T> + Sync,
{
    (0..count)
        .into_par_iter()
        .map(|i| {
            let rng = seeded(derive_seed(base_seed, i as u64));
            match catch_unwind(AssertUnwindSafe(|| f(i, rng))) {
                Ok(Ok(v)) => Ok(v),
                Ok(Err(e)) => Err(ReplicaFailure { index: i, message: e.to_string() }),
                Err(panic) => {
                    let message = panic
                        .downcast_ref::<&str>()
                        .map(|s| s.to_string())
                        .or_else(|| panic.downcast_ref::<String>().cloned())
                        .unwrap_or_else(|| "replica panicked".to_string());
                    Err(ReplicaFailure { index: i, message })
                }
            }
        })
        .collect()
}

/// Worker count from an explicit value, else `PATHPERC_WORKERS`, else the
/// machine's parallelism.
pub fn resolve_workers(explicit: Option<usize>) -> Result<usize> {
    if let Some(w) = explicit {
        return if w == 0 { Err(invalid("worker count must be at least 1")) } else { Ok(w) };
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(w) if w > 0 => Ok(w),
            _ => Err(invalid(format!("{WORKERS_ENV} must be a positive integer, got '{v}'"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Runs `f` inside a dedicated pool of `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| invalid(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}
