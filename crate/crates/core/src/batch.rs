//! Work split into fixed chunks.
//!
//! A job fixes its own chunk boundaries; a runner only decides which thread
//! evaluates which chunk. Results are concatenated in chunk order, so any
//! runner produces bit-identical output.

use alloc::vec::Vec;

pub trait ChunkedJob: Sync {
    type Item: Send;

    fn chunk_count(&self) -> usize;

    fn run_chunk(&self, index: usize) -> Vec<Self::Item>;
}

/// Evaluate every chunk on the current thread.
pub fn run_serial<J: ChunkedJob + ?Sized>(job: &J) -> Vec<J::Item> {
    let mut out = Vec::new();
    for i in 0..job.chunk_count() {
        out.extend(job.run_chunk(i));
    }
    out
}

/// Half-open index range of chunk `index` when `total` items are cut into
/// pieces of `size`.
pub fn chunk_range(total: usize, size: usize, index: usize) -> core::ops::Range<usize> {
    let lo = (index * size).min(total);
    let hi = (lo + size).min(total);
    lo..hi
}

pub fn chunks_for(total: usize, size: usize) -> usize {
    total.div_ceil(size)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Squares(usize);

    impl ChunkedJob for Squares {
        type Item = usize;
        fn chunk_count(&self) -> usize {
            chunks_for(self.0, 3)
        }
        fn run_chunk(&self, index: usize) -> Vec<usize> {
            chunk_range(self.0, 3, index).map(|i| i * i).collect()
        }
    }

    #[test]
    fn serial_runner_concatenates_in_order() {
        let v = run_serial(&Squares(7));
        assert_eq!(v, [0, 1, 4, 9, 16, 25, 36]);
        assert!(run_serial(&Squares(0)).is_empty());
    }
}
