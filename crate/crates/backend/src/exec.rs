//! Order-preserving fan-out over independent work items. With the
//! `parallel` feature (on by default) `Parallel` runs on a rayon pool of the
//! requested size; without it, every mode runs sequentially.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum Execution {
    #[default]
    Sequential,
    Parallel { workers: usize },
}

impl Execution {
    /// `Parallel` for more than one worker, otherwise `Sequential`.
    pub fn with_workers(workers: usize) -> Self {
        if workers > 1 {
            Execution::Parallel { workers }
        } else {
            Execution::Sequential
        }
    }

    pub fn workers(self) -> usize {
        match self {
            Execution::Sequential => 1,
            Execution::Parallel { workers } => workers.max(1),
        }
    }
}

/// Applies `f` to every item; results keep input order in every mode.
pub fn map<T, R, F>(items: &[T], exec: Execution, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        Execution::Parallel { workers } if workers > 1 && items.len() > 1 => parallel_map(items, workers, f),
        _ => items.iter().map(f).collect(),
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, R, F>(items: &[T], workers: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
        Err(_) => items.iter().map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, R, F>(items: &[T], _workers: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.iter().map(f).collect()
}
