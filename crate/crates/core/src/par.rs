//! Data-parallel helpers with a sequential fallback.
//!
//! Every helper preserves input order in its output, so results are
//! identical whichever [`Execution`] is used.

use crate::error::{Error, Result};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    /// Runs on the rayon pool. Falls back to sequential when the crate is
    /// built without the `parallel` feature.
    #[default]
    Parallel,
    Sequential,
}

impl Execution {
    /// Whether this mode really runs in parallel in the current build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

pub fn map<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Execution::Parallel {
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Configures the global worker pool. Only the first call has an effect.
pub fn set_threads(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::arg("thread count must be positive"));
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::arg(e.to_string()))?;
    Ok(())
}
