//! Data-parallel map with a sequential fallback.
//!
//! Batch operations (extraction, per-question tallies, corpus counting) go
//! through [`map_slice`] so the `parallel` feature is the only thing that
//! decides between rayon and a plain iterator. Output order always equals
//! input order, so callers can reduce deterministically.

#[cfg(feature = "parallel")]
pub fn map_slice<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_slice<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.iter().map(f).collect()
}
