//! Replicate-level parallelism.
//!
//! Monte Carlo driver loops fan out over replicate indices. With the
//! `parallel` feature (default) the fan-out uses rayon; without it the same
//! loop runs sequentially. Results are collected in index order, so output is
//! bit-identical across the two code paths and across thread counts.

/// Map `f` over replicate indices `0..count`, in parallel when the
/// `parallel` feature is enabled.
pub fn map_replicates<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..count).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(f).collect()
    }
}

/// Sequential twin of [`map_replicates`], kept available in all builds so
/// benchmarks can compare the two directly.
pub fn map_replicates_seq<T, F>(count: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..count).map(f).collect()
}
