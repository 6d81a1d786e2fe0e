//! Execution policy for the data-parallel loops (trajectory sectors, time
//! samples, sweep grid points).
//!
//! With the `parallel` feature (default) `Exec::Parallel` dispatches to the
//! rayon pool; without it every policy runs sequentially. Both policies
//! return results in input order, so reductions done by callers are
//! independent of the policy.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "CAVSIM_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// Maps `func` over `items`, preserving order.
    pub fn map<T, R, F>(self, items: &[T], func: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return items.par_iter().map(func).collect();
        }
        items.iter().map(func).collect()
    }

    /// Maps over `0..len`, preserving order.
    pub fn map_range<R, F>(self, len: usize, func: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return (0..len).into_par_iter().map(func).collect();
        }
        (0..len).map(func).collect()
    }
}

/// Reads [`WORKERS_ENV`] and sizes the global pool. Returns the worker count
/// in effect. Unset or unparsable values leave the default (available
/// parallelism).
pub fn init_workers_from_env() -> usize {
    let requested = std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0);
    init_workers(requested)
}

#[cfg(feature = "parallel")]
fn init_workers(requested: Option<usize>) -> usize {
    if let Some(n) = requested {
        // Fails only if the pool was already built; the existing pool wins.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    rayon::current_num_threads()
}

#[cfg(not(feature = "parallel"))]
fn init_workers(_requested: Option<usize>) -> usize {
    1
}
