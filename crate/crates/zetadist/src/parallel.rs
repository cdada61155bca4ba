//! Multi-threaded evaluation of [`ChunkedJob`]s.
//!
//! Chunks are fixed by the job, so the output is bit-identical for every
//! worker count.

use rayon::prelude::*;
use zetadist_core::batch::{run_serial, ChunkedJob};

/// `0` means one worker per available core.
pub fn resolve_workers(workers: usize) -> usize {
    if workers == 0 {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    } else {
        workers
    }
}

pub fn run_job<J: ChunkedJob>(job: &J, workers: usize) -> Vec<J::Item> {
    let workers = resolve_workers(workers);
    if workers == 1 {
        return run_serial(job);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");
    let chunks: Vec<Vec<J::Item>> = pool.install(|| {
        (0..job.chunk_count())
            .into_par_iter()
            .map(|i| job.run_chunk(i))
            .collect()
    });
    chunks.into_iter().flatten().collect()
}

/// Map `f` over `items` on `workers` threads, keeping input order.
pub fn par_map<T: Sync, R: Send>(
    items: &[T],
    workers: usize,
    f: impl Fn(&T) -> R + Sync + Send,
) -> Vec<R> {
    let workers = resolve_workers(workers);
    if workers == 1 {
        return items.iter().map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");
    pool.install(|| items.par_iter().map(f).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use zetadist_core::torus::{TorusModel, TorusSampler};

    #[test]
    fn worker_count_does_not_change_output() {
        let m = TorusModel::new(0.7, 100.0).unwrap();
        let job = TorusSampler::new(&m, 5000, 11);
        let a = run_job(&job, 1);
        let b = run_job(&job, 3);
        assert_eq!(a.len(), 5000);
        assert!(a
            .iter()
            .zip(&b)
            .all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits()));
    }
}
