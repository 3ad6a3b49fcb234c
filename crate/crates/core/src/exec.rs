//! Execution strategy for per-document work.
//!
//! Corpus-level operations are data-parallel over documents. With the
//! `parallel` feature (on by default) [`map`] fans out over a rayon pool;
//! without it, [`map`] is the sequential loop. Both produce identical output
//! in identical order, so the feature only affects wall-clock time.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Sequential map, kept available under every feature set so the two
/// strategies can be compared directly.
pub fn seq_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Parallel map over a rayon pool. Output order matches input order.
#[cfg(feature = "parallel")]
pub fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

/// Map with the crate's active strategy: parallel when the `parallel`
/// feature is enabled, sequential otherwise.
#[cfg(feature = "parallel")]
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    par_map(items, f)
}

/// Map with the crate's active strategy: parallel when the `parallel`
/// feature is enabled, sequential otherwise.
#[cfg(not(feature = "parallel"))]
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    seq_map(items, f)
}
