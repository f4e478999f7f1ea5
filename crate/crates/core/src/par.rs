//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) the `map*` functions fan out over
//! rayon; without it they degrade to plain loops. The `*_seq` variants are
//! always sequential and exist so benchmarks can compare both paths in one
//! binary.

/// Execution strategy for operations that offer both code paths.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parallelism {
    Sequential,
    /// Rayon work-stealing; identical to `Sequential` when the `parallel`
    /// feature is disabled.
    Rayon,
}

/// Map `f` over `0..len`, parallel when the feature allows it.
pub fn map_indexed<T: Send>(len: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}

/// Sequential counterpart of [`map_indexed`].
pub fn map_indexed_seq<T>(len: usize, f: impl Fn(usize) -> T) -> Vec<T> {
    (0..len).map(f).collect()
}

/// Map with an explicit strategy.
pub fn map_indexed_with<T: Send>(
    mode: Parallelism,
    len: usize,
    f: impl Fn(usize) -> T + Sync + Send,
) -> Vec<T> {
    match mode {
        Parallelism::Sequential => map_indexed_seq(len, f),
        Parallelism::Rayon => map_indexed(len, f),
    }
}

/// Map `f` over a slice, parallel when the feature allows it.
pub fn map_slice<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_paths_agree() {
        let sq = |i: usize| i * i;
        assert_eq!(map_indexed(100, sq), map_indexed_seq(100, sq));
        assert_eq!(
            map_indexed_with(Parallelism::Rayon, 50, sq),
            map_indexed_with(Parallelism::Sequential, 50, sq)
        );
    }
}
