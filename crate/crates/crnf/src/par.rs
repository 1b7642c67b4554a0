//! Data-parallel map helper with a sequential fallback.
//!
//! Scans and batch solves are embarrassingly parallel over their work items;
//! callers pick the execution mode at runtime so benches can compare both.

/// Execution mode for data-parallel scans.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Parallelism {
    Sequential,
    /// Rayon work-stealing; falls back to sequential when the `parallel`
    /// feature is disabled.
    Rayon,
}

impl Default for Parallelism {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            Parallelism::Rayon
        }
        #[cfg(not(feature = "parallel"))]
        {
            Parallelism::Sequential
        }
    }
}

/// Maps `f` over `items`, preserving order.
pub fn map_items<T, U, F>(mode: Parallelism, items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Send + Sync,
{
    match mode {
        Parallelism::Sequential => items.into_iter().map(f).collect(),
        Parallelism::Rayon => {
            #[cfg(feature = "parallel")]
            {
                use rayon::prelude::*;
                items.into_par_iter().map(f).collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                items.into_iter().map(f).collect()
            }
        }
    }
}
