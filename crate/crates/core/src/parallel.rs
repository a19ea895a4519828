//! Work distribution. With the `parallel` feature, work runs on a rayon
//! pool; without it every call degrades to a plain sequential loop with the
//! same output order.

use std::sync::atomic::{AtomicBool, Ordering};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Runs independent work items, optionally on a dedicated thread pool.
#[derive(Default)]
pub struct Executor {
    #[cfg(feature = "parallel")]
    pool: Option<rayon::ThreadPool>,
}

impl std::fmt::Debug for Executor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Executor")
            .field("jobs", &self.jobs())
            .finish()
    }
}

impl Executor {
    /// `None` uses the global pool (or the sequential fallback).
    pub fn with_jobs(jobs: Option<usize>) -> Result<Self> {
        match jobs {
            Some(0) => Err(Error::InvalidParameter(
                "job count must be at least 1".into(),
            )),
            #[cfg(feature = "parallel")]
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
                Ok(Executor { pool: Some(pool) })
            }
            _ => Ok(Executor::default()),
        }
    }

    pub fn sequential() -> Self {
        Executor::with_jobs(Some(1)).expect("one job is always valid")
    }

    pub fn jobs(&self) -> usize {
        #[cfg(feature = "parallel")]
        {
            match &self.pool {
                Some(p) => p.current_num_threads(),
                None => rayon::current_num_threads(),
            }
        }
        #[cfg(not(feature = "parallel"))]
        {
            1
        }
    }

    #[cfg(feature = "parallel")]
    fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        match &self.pool {
            Some(p) => p.install(f),
            None => f(),
        }
    }

    /// Maps every item; results come back in input order.
    pub fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        {
            self.install(|| items.par_iter().map(&f).collect())
        }
        #[cfg(not(feature = "parallel"))]
        {
            items.iter().map(f).collect()
        }
    }

    /// Maps every item and hands each result to `sink` on the calling
    /// thread as soon as it is ready, in completion order. An error from
    /// `sink` stops the remaining items from being started.
    pub fn stream<T, R, F, S, E>(
        &self,
        items: &[T],
        f: F,
        mut sink: S,
    ) -> std::result::Result<(), E>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
        S: FnMut(R) -> std::result::Result<(), E>,
    {
        let cancelled = AtomicBool::new(false);
        #[cfg(feature = "parallel")]
        {
            std::thread::scope(|scope| {
                let (tx, rx) = std::sync::mpsc::channel();
                let cancelled = &cancelled;
                let f = &f;
                scope.spawn(move || {
                    self.install(|| {
                        items.par_iter().for_each_with(tx, |tx, item| {
                            if !cancelled.load(Ordering::Relaxed) {
                                let _ = tx.send(f(item));
                            }
                        })
                    })
                });
                for r in rx {
                    if let Err(e) = sink(r) {
                        cancelled.store(true, Ordering::Relaxed);
                        return Err(e);
                    }
                }
                Ok(())
            })
        }
        #[cfg(not(feature = "parallel"))]
        {
            for item in items {
                if cancelled.load(Ordering::Relaxed) {
                    break;
                }
                sink(f(item))?;
            }
            Ok(())
        }
    }
}
