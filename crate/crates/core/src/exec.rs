//! Execution helpers: data-parallel map with a sequential fallback.
//!
//! With the `parallel` feature (enabled by default) the indexed maps run on
//! the rayon thread pool. Without it they degrade to plain sequential loops
//! with identical results: all callers collect into index-ordered vectors and
//! reduce sequentially afterwards, so outputs are bit-identical either way.

#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Always-sequential variant, kept for benchmark baselines and for callers
/// that want to pin work to the current thread.
pub(crate) fn map_indexed_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}
