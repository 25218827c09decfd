//! Data-parallel helpers. With the `parallel` feature (default) work is
//! spread over the rayon pool; without it, or with
//! [`Execution::Sequential`], everything runs on the calling thread.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

impl Execution {
    /// Whether this mode actually runs on more than one thread.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// Order-preserving map.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Folds every index of `range` and merges the partial results. `reduce`
    /// must be associative; its argument order follows index order.
    pub fn fold_range<A, I, F, R>(self, range: Range<u64>, identity: I, fold: F, reduce: R) -> A
    where
        A: Send,
        I: Fn() -> A + Sync + Send,
        F: Fn(A, u64) -> A + Sync + Send,
        R: Fn(A, A) -> A + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return range.into_par_iter().fold(&identity, &fold).reduce(&identity, &reduce);
        }
        let _ = &reduce;
        range.fold(identity(), fold)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let items: Vec<u64> = (0..1000).collect();
        let a = Execution::Parallel.map(&items, |x| x * x);
        let b = Execution::Sequential.map(&items, |x| x * x);
        assert_eq!(a, b);

        let sum = |e: Execution| e.fold_range(0..10_000, || 0u64, |acc, i| acc + i, |a, b| a + b);
        assert_eq!(sum(Execution::Parallel), sum(Execution::Sequential));
        assert_eq!(sum(Execution::Sequential), 9_999 * 10_000 / 2);
    }
}
