//! Data-parallel driver for independent trials.
//!
//! `run` fans indexed jobs across a thread pool when the `parallel`
//! feature is enabled and falls back to a sequential loop otherwise;
//! `run_seq` is always sequential. Jobs receive only their index, so
//! results are identical under both drivers — randomness must come from
//! per-index streams, never shared state.

/// Run `count` independent jobs, in parallel when built with the
/// `parallel` feature. Results are returned in index order.
#[cfg(feature = "parallel")]
pub fn run<T, F>(count: u64, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..count).into_par_iter().map(job).collect()
}

/// Sequential build of `run`.
#[cfg(not(feature = "parallel"))]
pub fn run<T, F>(count: u64, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    run_seq(count, job)
}

/// Always-sequential driver, kept available for benchmarking the
/// parallel speedup and for strictly ordered debugging runs.
pub fn run_seq<T, F>(count: u64, job: F) -> Vec<T>
where
    F: Fn(u64) -> T,
{
    (0..count).map(job).collect()
}
