//! Compensated summation and a deterministic parallel reduction.
//!
//! Every sum over a spectrum in this crate goes through these helpers so
//! that results are reproducible bit for bit: fixed evaluation order,
//! Neumaier compensation, and a chunked reduction whose partials are
//! combined in chunk order no matter how many worker threads ran.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::OnceLock;

/// Neumaier variant of Kahan summation. Unlike plain Kahan it stays
/// accurate when an addend exceeds the running sum in magnitude.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Folds another partial sum in, compensation term included. Used
    /// when combining chunk partials; the order of these calls is what
    /// the determinism guarantee rests on.
    #[inline]
    pub fn merge(&mut self, other: KahanSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of an iterator in its own order.
pub fn sum_compensated<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    let mut acc = KahanSum::new();
    for x in iter {
        acc.add(x);
    }
    acc.value()
}

// ---------------------------------------------------------------------------
// Deterministic chunked reduction
// ---------------------------------------------------------------------------

/// Terms per chunk. Fixed so that chunk boundaries, and therefore the
/// rounding of every partial, do not depend on the thread count.
const CHUNK: usize = 8192;

static MAX_THREADS: OnceLock<usize> = OnceLock::new();

/// Caps the worker threads used by [`sum_indexed`]. May be set once per
/// process (later calls are ignored); 0 means "use the available
/// parallelism". The setting never affects computed values, only wall
/// time.
pub fn set_max_threads(n: usize) {
    let n = if n == 0 {
        std::thread::available_parallelism().map_or(1, |p| p.get())
    } else {
        n
    };
    let _ = MAX_THREADS.set(n.max(1));
}

fn max_threads() -> usize {
    *MAX_THREADS.get().unwrap_or(&1)
}

fn chunk_partial<F: Fn(usize) -> f64>(chunk: usize, n: usize, term: &F) -> KahanSum {
    let lo = chunk * CHUNK;
    let hi = ((chunk + 1) * CHUNK).min(n);
    let mut acc = KahanSum::new();
    for i in lo..hi {
        acc.add(term(i));
    }
    acc
}

/// Sums `term(0) + term(1) + ... + term(n-1)` with compensation.
///
/// The index range is split into fixed chunks of [`CHUNK`] terms; each
/// chunk is summed in index order and the partials are merged in chunk
/// order. Threads only decide who computes which chunk, so the result
/// is bit-identical for every thread count, including 1.
pub fn sum_indexed<F>(n: usize, term: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let n_chunks = n.div_ceil(CHUNK);
    let threads = max_threads().min(n_chunks.max(1));
    let mut partials: Vec<KahanSum> = vec![KahanSum::new(); n_chunks];

    if threads <= 1 || n_chunks <= 1 {
        for (c, slot) in partials.iter_mut().enumerate() {
            *slot = chunk_partial(c, n, &term);
        }
    } else {
        let next = AtomicUsize::new(0);
        let term_ref = &term;
        let next_ref = &next;
        std::thread::scope(|scope| {
            let mut handles = Vec::with_capacity(threads);
            for _ in 0..threads {
                handles.push(scope.spawn(move || {
                    let mut mine = Vec::new();
                    loop {
                        let c = next_ref.fetch_add(1, Ordering::Relaxed);
                        if c >= n_chunks {
                            break;
                        }
                        mine.push((c, chunk_partial(c, n, term_ref)));
                    }
                    mine
                }));
            }
            for h in handles {
                for (c, p) in h.join().expect("summation worker panicked") {
                    partials[c] = p;
                }
            }
        });
    }

    let mut total = KahanSum::new();
    for p in partials {
        total.merge(p);
    }
    total.value()
}
