//! Execution helpers: data-parallel maps with a sequential fallback.
//!
//! Parallelism is only ever applied across independent items (resources,
//! graph nodes, documents) with order-preserving collection, never across
//! floating-point reductions, so results are bit-identical for any thread
//! count and for the sequential build.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over a slice, in parallel when the `parallel` feature is on.
/// Output order always matches input order.
pub(crate) fn map_slice<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Maps `f` over an index range, in parallel when the `parallel` feature is
/// on. Output order always matches index order.
pub(crate) fn map_range<U, F>(len: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}

/// Always-sequential variant of [`map_slice`], kept as the reference path
/// for benches comparing the two execution modes.
pub(crate) fn map_slice_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Whether this build runs data-parallel loops on rayon.
pub(crate) fn parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}
