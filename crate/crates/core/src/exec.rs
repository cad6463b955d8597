/// Execution policy for the data-parallel loops.
///
/// `Parallel` only takes effect when the crate is built with the `parallel`
/// feature; otherwise it runs the same code sequentially.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Evaluates `f(0..n)` and returns results in index order.
pub(crate) fn map_indexed<T, F>(exec: Execution, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Maps `f` over `items`, keeping input order.
pub(crate) fn map_slice<S, T, F>(exec: Execution, items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Folds `lo..hi` into the minimum under `better`, which must be a strict
/// total order so the result does not depend on the split.
pub(crate) fn min_over_range<T, F, B>(
    exec: Execution,
    lo: u64,
    hi: u64,
    f: F,
    better: B,
) -> Option<T>
where
    T: Send + Copy,
    F: Fn(u64) -> T + Sync + Send,
    B: Fn(&T, &T) -> bool + Sync + Send,
{
    let pick = |a: T, b: T| if better(&b, &a) { b } else { a };
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (lo..hi).into_par_iter().map(&f).reduce_with(pick);
    }
    let _ = exec;
    (lo..hi).map(f).reduce(pick)
}
