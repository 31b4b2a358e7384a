//! Deterministic parallel execution of independent trials.
//!
//! Work splits into fixed-size chunks of stream ids, each chunk folds into
//! its own accumulator, and the partial accumulators merge in ascending
//! chunk order. Chunk boundaries do not depend on the thread count, so
//! results (including floating-point sums) are bit-identical for any
//! number of workers.

use rayon::prelude::*;

/// Stream ids per chunk. Fixed so that partitioning never depends on the
/// worker count.
pub const CHUNK_SIZE: u64 = 16_384;

/// Fold `n_items` independent items (keyed 0..n) into an accumulator.
///
/// `threads = 0` uses all available cores. `make` builds an empty
/// accumulator, `fold_item(acc, item_index)` processes one item, and
/// `merge` combines two accumulators (applied left to right in chunk
/// order).
pub fn parallel_fold<A, Make, Fold, Merge>(
    n_items: u64,
    threads: usize,
    make: Make,
    fold_item: Fold,
    merge: Merge,
) -> A
where
    A: Send,
    Make: Fn() -> A + Sync,
    Fold: Fn(&mut A, u64) + Sync,
    Merge: Fn(&mut A, A),
{
    if n_items == 0 {
        return make();
    }
    let n_chunks = n_items.div_ceil(CHUNK_SIZE);
    let run = || {
        (0..n_chunks)
            .into_par_iter()
            .map(|c| {
                let mut acc = make();
                let lo = c * CHUNK_SIZE;
                let hi = ((c + 1) * CHUNK_SIZE).min(n_items);
                for item in lo..hi {
                    fold_item(&mut acc, item);
                }
                acc
            })
            .collect::<Vec<A>>()
    };
    let partials = if threads == 0 {
        run()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("worker pool");
        pool.install(run)
    };
    let mut iter = partials.into_iter();
    let mut out = iter.next().expect("at least one chunk");
    for part in iter {
        merge(&mut out, part);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedPlan;

    #[test]
    fn sums_are_bit_identical_across_thread_counts() {
        let plan = SeedPlan::new(99);
        let run = |threads: usize| {
            parallel_fold(
                100_000,
                threads,
                || 0.0f64,
                |acc, idx| {
                    let mut rng = plan.stream(idx).rng();
                    *acc += crate::rng::normal(&mut rng);
                },
                |a, b| *a += b,
            )
        };
        let one = run(1);
        let two = run(2);
        let four = run(4);
        assert_eq!(one.to_bits(), two.to_bits());
        assert_eq!(one.to_bits(), four.to_bits());
    }

    #[test]
    fn empty_input() {
        let out = parallel_fold(0, 1, || 7u64, |acc, _| *acc += 1, |a, b| *a += b);
        assert_eq!(out, 7);
    }

    #[test]
    fn covers_every_item_once() {
        let n = 3 * CHUNK_SIZE + 17;
        let total = parallel_fold(
            n,
            0,
            || 0u64,
            |acc, _| *acc += 1,
            |a, b| *a += b,
        );
        assert_eq!(total, n);
    }
}
