//! Fiber-loop helpers. Each fiber is computed independently and results are
//! collected in fiber order, so the serial and parallel paths agree bitwise.

use alloc::vec::Vec;

#[cfg(feature = "rayon")]
use rayon::prelude::*;

pub(crate) fn map_fibers<T, F>(fibers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "rayon")]
    {
        (0..fibers).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "rayon"))]
    {
        (0..fibers).map(f).collect()
    }
}

/// Runs `f(i, row)` over consecutive rows of `width` elements.
pub(crate) fn for_each_row<T, F>(values: &mut [T], width: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "rayon")]
    {
        values
            .par_chunks_mut(width)
            .enumerate()
            .for_each(|(i, row)| f(i, row));
    }
    #[cfg(not(feature = "rayon"))]
    {
        values
            .chunks_mut(width)
            .enumerate()
            .for_each(|(i, row)| f(i, row));
    }
}
