//! Data-parallel helpers. With the `parallel` feature the work is spread over
//! a rayon pool; without it everything runs on the calling thread. Results
//! are always returned in index order, so callers that reduce them in a fixed
//! order get bit-identical output for any worker count.

/// Number of workers requested for a run. `0` means "all available cores".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Workers(pub usize);

impl Workers {
    pub fn sequential() -> Self {
        Workers(1)
    }
}

/// Evaluates `f(0), ..., f(count - 1)` and returns the results in index order.
#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(count: usize, workers: Workers, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    if workers.0 == 1 || count <= 1 {
        return (0..count).map(f).collect();
    }
    let run = || (0..count).into_par_iter().map(&f).collect();
    if workers.0 == 0 {
        run()
    } else {
        match rayon::ThreadPoolBuilder::new().num_threads(workers.0).build() {
            Ok(pool) => pool.install(run),
            Err(_) => (0..count).map(&f).collect(),
        }
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(count: usize, _workers: Workers, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..count).map(f).collect()
}

/// `map_indexed` over the elements of a slice.
pub fn map_slice<S, T, F>(items: &[S], workers: Workers, f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    map_indexed(items.len(), workers, |i| f(&items[i]))
}
