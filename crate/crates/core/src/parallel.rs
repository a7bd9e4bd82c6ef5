//! Index-parallel map that falls back to a serial loop without the
//! `parallel` feature. Output order never depends on scheduling.

pub fn map_indices<T, F>(n: usize, f: F) -> Vec<T>
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

/// Builds a dense matrix from independently computed rows.
pub fn matrix_from_rows<F>(nrows: usize, ncols: usize, row: F) -> crate::linalg::Matrix
where
    F: Fn(usize) -> Vec<crate::numerics::C64> + Sync + Send,
{
    let rows = map_indices(nrows, row);
    crate::linalg::Matrix::from_fn(nrows, ncols, |i, j| rows[i][j])
}

/// Sizes the global worker pool. Has no effect once the pool is running or
/// without the `parallel` feature.
pub fn set_threads(n: usize) {
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = n;
    }
}

/// Number of workers `map_indices` runs on.
pub fn current_threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}
