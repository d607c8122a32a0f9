//! Data-parallel helpers. With the `parallel` feature they run on the rayon
//! pool of the caller; without it they are plain sequential loops with the
//! same ordering guarantees.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// `items.map(f)`, preserving order.
#[cfg(feature = "parallel")]
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Fallible [`map`]; returns the first error in item order.
pub fn try_map<T, U, E, F>(items: &[T], f: F) -> Result<Vec<U>, E>
where
    T: Sync,
    U: Send,
    E: Send,
    F: Fn(&T) -> Result<U, E> + Sync + Send,
{
    map(items, f).into_iter().collect()
}

/// Whether work is actually spread over threads.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
