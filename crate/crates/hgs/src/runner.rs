//! Thread-backed [`PartitionRunner`].

use std::thread;

use hgs_core::PartitionRunner;

/// Runs each part on its own scoped thread and joins in worker order.
#[derive(Clone, Copy, Debug, Default)]
pub struct ThreadRunner;

impl PartitionRunner for ThreadRunner {
    fn run<T, F>(&self, workers: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync,
    {
        if workers <= 1 {
            return (0..workers).map(&job).collect();
        }
        let job = &job;
        thread::scope(|s| {
            let handles: Vec<_> = (0..workers).map(|w| s.spawn(move || job(w))).collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker panicked"))
                .collect()
        })
    }
}
