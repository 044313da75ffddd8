//! Sequential or rayon-backed execution of the data-parallel loops.
//!
//! Parallel execution needs the `parallel` feature (on by default). Without
//! it, [`Execution::Parallel`] silently runs on the calling thread.

use thiserror::Error;

#[derive(Debug, Error)]
#[error("could not start worker pool: {0}")]
pub struct ExecError(String);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// `threads: None` uses the global rayon pool.
    Parallel {
        threads: Option<usize>,
    },
}

impl Execution {
    /// `0` or `1` workers mean sequential.
    pub fn with_workers(n: usize) -> Self {
        if n <= 1 {
            Execution::Sequential
        } else {
            Execution::Parallel { threads: Some(n) }
        }
    }
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel { threads: None }
        } else {
            Execution::Sequential
        }
    }
}

pub struct Executor {
    parallel: bool,
    #[cfg(feature = "parallel")]
    pool: Option<rayon::ThreadPool>,
}

impl Executor {
    pub fn new(mode: Execution) -> Result<Self, ExecError> {
        match mode {
            Execution::Sequential => Ok(Self::sequential()),
            #[cfg(feature = "parallel")]
            Execution::Parallel { threads } => {
                let pool = threads
                    .map(|n| {
                        rayon::ThreadPoolBuilder::new()
                            .num_threads(n)
                            .build()
                            .map_err(|e| ExecError(e.to_string()))
                    })
                    .transpose()?;
                Ok(Executor {
                    parallel: true,
                    pool,
                })
            }
            #[cfg(not(feature = "parallel"))]
            Execution::Parallel { .. } => Ok(Self::sequential()),
        }
    }

    pub fn sequential() -> Self {
        Executor {
            parallel: false,
            #[cfg(feature = "parallel")]
            pool: None,
        }
    }

    pub fn is_parallel(&self) -> bool {
        self.parallel
    }

    /// Folds `items` into per-worker accumulators and merges them. `reduce`
    /// must be associative and commutative, since the merge order is not
    /// fixed in parallel mode.
    pub fn fold_reduce<T, A, I, F, R>(&self, items: &[T], identity: I, fold: F, reduce: R) -> A
    where
        T: Sync,
        A: Send,
        I: Fn() -> A + Sync + Send,
        F: Fn(A, &T) -> A + Sync + Send,
        R: Fn(A, A) -> A + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.parallel {
            use rayon::prelude::*;
            let run = || {
                items
                    .par_iter()
                    .fold(&identity, &fold)
                    .reduce(&identity, &reduce)
            };
            return match &self.pool {
                Some(pool) => pool.install(run),
                None => run(),
            };
        }
        let _ = &reduce;
        items.iter().fold(identity(), fold)
    }
}

impl std::fmt::Debug for Executor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Executor")
            .field("parallel", &self.parallel)
            .finish()
    }
}
