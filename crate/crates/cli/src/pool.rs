//! Fixed-order parallel sweep evaluation.
//!
//! Sweep points are dispatched to a scoped worker pool; results land in the
//! original job order, so output files do not depend on scheduling. The
//! `SIM_THREADS` environment variable caps the worker count (default:
//! hardware parallelism).

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Worker count: min(jobs, SIM_THREADS or hardware parallelism).
pub fn worker_count(jobs: usize) -> usize {
    let hardware = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let cap = match std::env::var("SIM_THREADS") {
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(n) if n >= 1 => n,
            _ => {
                eprintln!("ignoring invalid SIM_THREADS={raw:?}");
                hardware
            }
        },
        Err(_) => hardware,
    };
    cap.min(jobs).max(1)
}

/// Maps `f` over `jobs` in parallel, returning results in job order.
pub fn run_ordered<J, R, F>(jobs: &[J], f: F) -> Vec<R>
where
    J: Sync,
    R: Send,
    F: Fn(&J) -> R + Sync,
{
    if jobs.is_empty() {
        return Vec::new();
    }
    let workers = worker_count(jobs.len());
    let next = AtomicUsize::new(0);
    let results: Vec<Mutex<Option<R>>> = (0..jobs.len()).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, Ordering::Relaxed);
                if index >= jobs.len() {
                    break;
                }
                let value = f(&jobs[index]);
                *results[index].lock().expect("result slot") = Some(value);
            });
        }
    });
    results
        .into_iter()
        .map(|slot| slot.into_inner().expect("result slot").expect("job completed"))
        .collect()
}
