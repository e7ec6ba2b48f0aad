//! Data-parallel execution helpers. With the `parallel` feature (default)
//! work items fan out over rayon; without it the same entry points run
//! sequentially, which keeps results bit-identical either way since every
//! reduction here is order-insensitive.

/// Map over 0..n, fanning out across the pool; output order follows the
/// index regardless of completion order.
#[cfg(feature = "parallel")]
pub fn parallel_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn parallel_map<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

pub(crate) use parallel_map as map_indexed;

/// Count (event_a, event_b) outcomes over `trials` independent work items.
#[cfg(feature = "parallel")]
pub(crate) fn count_outcomes<F>(trials: u64, f: F) -> (u64, u64)
where
    F: Fn(u64) -> (bool, bool) + Sync + Send,
{
    use rayon::prelude::*;
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let (a, b) = f(t);
            (a as u64, b as u64)
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1))
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn count_outcomes<F>(trials: u64, f: F) -> (u64, u64)
where
    F: Fn(u64) -> (bool, bool),
{
    (0..trials).fold((0, 0), |acc, t| {
        let (a, b) = f(t);
        (acc.0 + a as u64, acc.1 + b as u64)
    })
}

/// Run `f` inside a thread pool capped at `jobs` workers (None = default
/// pool). Sequential builds ignore the cap.
#[cfg(feature = "parallel")]
pub fn with_thread_limit<T, F>(jobs: Option<usize>, f: F) -> T
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    match jobs {
        Some(j) if j > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .expect("thread pool construction")
            .install(f),
        _ => f(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_thread_limit<T, F>(_jobs: Option<usize>, f: F) -> T
where
    F: FnOnce() -> T,
{
    f()
}
