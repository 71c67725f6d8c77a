//! Sequential / parallel execution switch for the data-parallel loops.

use serde::Serialize;

/// How independent work items are evaluated.
///
/// `Parallel` uses rayon when the `parallel` feature is compiled in and is
/// identical to `Sequential` otherwise. Outputs are always collected in input
/// order, so any reduction performed by the caller sees the same sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// Maps `f` over `0..n`, returning results in index order.
    pub fn map_indexed<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).collect()
            }
            _ => (0..n).map(f).collect(),
        }
    }

    /// Maps `f` over a slice, returning results in slice order.
    pub fn map_slice<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        self.map_indexed(items.len(), |i| f(&items[i]))
    }

    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}
