//! Execution strategy for embarrassingly parallel index loops.
//!
//! All fan-out in the crate (sampler reads, Gibbs chains, exhaustive
//! enumeration blocks) is expressed as "map a pure function over `0..len`
//! and collect in index order". That shape makes the parallel and sequential
//! paths produce identical vectors, so the `parallel` feature only changes
//! wall-clock time, never results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `0..len`, collecting results in index order.
///
/// Dispatches to rayon when the `parallel` feature is enabled, otherwise to
/// the sequential loop. Output is identical either way.
pub fn map_indexed<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        map_indexed_parallel(len, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_indexed_sequential(len, f)
    }
}

/// Sequential reference implementation of [`map_indexed`].
pub fn map_indexed_sequential<T, F>(len: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..len).map(f).collect()
}

/// Rayon implementation of [`map_indexed`]; collects in index order.
#[cfg(feature = "parallel")]
pub fn map_indexed_parallel<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..len).into_par_iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequential_preserves_index_order() {
        let out = map_indexed_sequential(5, |i| 10 * i);
        assert_eq!(out, vec![0, 10, 20, 30, 40]);
    }

    #[test]
    fn dispatch_matches_sequential() {
        let f = |i: usize| (i as u64).wrapping_mul(0x9e37_79b9).rotate_left(7);
        assert_eq!(map_indexed(1000, f), map_indexed_sequential(1000, f));
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_matches_sequential() {
        let f = |i: usize| format!("item-{i}");
        assert_eq!(map_indexed_parallel(257, f), map_indexed_sequential(257, f));
    }

    #[test]
    fn empty_range_yields_empty_vec() {
        let out: Vec<u8> = map_indexed(0, |_| unreachable!());
        assert!(out.is_empty());
    }
}
