//! Order-preserving batch mapping. With the `parallel` feature (default),
//! items are dispatched to a bounded rayon pool; without it, the same API
//! runs sequentially. Results come back in input order either way, so
//! reports are identical across modes.

/// Map `f` over `items` in input order, sequentially.
pub fn map_ordered_serial<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U + Sync + Send,
    T: Send,
    U: Send,
{
    items.into_iter().map(f).collect()
}

/// Map `f` over `items`, preserving input order in the output. `jobs = 1`
/// (or a build without the `parallel` feature) runs sequentially; `jobs = 0`
/// uses all available cores.
#[cfg(feature = "parallel")]
pub fn map_ordered<T, U, F>(items: Vec<T>, jobs: usize, f: F) -> Vec<U>
where
    F: Fn(T) -> U + Sync + Send,
    T: Send,
    U: Send,
{
    use rayon::prelude::*;
    if jobs == 1 {
        return map_ordered_serial(items, f);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("failed to build worker pool");
    pool.install(|| items.into_par_iter().map(f).collect())
}

#[cfg(not(feature = "parallel"))]
pub fn map_ordered<T, U, F>(items: Vec<T>, _jobs: usize, f: F) -> Vec<U>
where
    F: Fn(T) -> U + Sync + Send,
    T: Send,
    U: Send,
{
    map_ordered_serial(items, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_order() {
        let items: Vec<u64> = (0..500).collect();
        let serial = map_ordered_serial(items.clone(), |x| x * x);
        let parallel = map_ordered(items, 4, |x| x * x);
        assert_eq!(serial, parallel);
    }
}
