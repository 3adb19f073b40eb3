//! Data-parallel execution with a sequential fallback.
//!
//! Work is always split into the same index ranges and results are
//! reassembled in index order, so both modes produce bit-identical output.
//! Without the `parallel` feature, [`Exec::Parallel`] runs sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
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

/// Items per chunk in [`Exec::fold_chunks`].
pub const CHUNK: usize = 1024;

impl Exec {
    /// `f(0), …, f(n − 1)` in order.
    pub fn map_range<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => (0..n).into_par_iter().map(f).collect(),
            _ => (0..n).map(f).collect(),
        }
    }

    /// Folds `0..n` in fixed chunks of [`CHUNK`] indices with `fold`, then
    /// merges the chunk results left to right with `merge`.
    pub fn fold_chunks<A, Init, Fold, Merge>(self, n: usize, init: Init, fold: Fold, merge: Merge) -> A
    where
        A: Send,
        Init: Fn() -> A + Sync + Send,
        Fold: Fn(&mut A, usize) + Sync + Send,
        Merge: Fn(A, A) -> A,
    {
        let chunks = n.div_ceil(CHUNK);
        let partials = self.map_range(chunks, |c| {
            let mut acc = init();
            for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                fold(&mut acc, i);
            }
            acc
        });
        partials.into_iter().fold(init(), merge)
    }
}
