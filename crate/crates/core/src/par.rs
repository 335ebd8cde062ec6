//! Thin shim over rayon so the crate builds (and gives identical numbers)
//! without the `parallel` feature.

/// Maps `f` over `0..n`, collecting results in index order. Runs on the
/// rayon pool when the `parallel` feature is enabled, sequentially otherwise;
/// outputs are identical either way because each index derives its own RNG
/// stream.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}
