//! Static-partition fan-out over an index range.
//!
//! Work items are split into `workers` contiguous blocks, each handled by one
//! scoped thread with its own scratch state, and results land in index order.
//! Without the `std` feature everything runs on the calling thread.

use alloc::vec::Vec;
use core::ops::Range;

/// Number of workers actually used for `requested` workers over `items` items.
pub fn effective_workers(requested: usize, items: usize) -> usize {
    if cfg!(feature = "std") {
        requested.clamp(1, items.max(1))
    } else {
        1
    }
}

/// Contiguous block of `0..items` owned by worker `w` of `workers`.
pub fn block(items: usize, workers: usize, w: usize) -> Range<usize> {
    let base = items / workers;
    let extra = items % workers;
    let start = w * base + w.min(extra);
    let len = base + usize::from(w < extra);
    start..start + len
}

/// Fill `out[i] = f(&mut scratch, i)` for every index, with one `scratch`
/// (from `init`) per worker.
pub fn fill_indexed<T, S, I, F>(out: &mut [T], workers: usize, init: I, f: F)
where
    T: Send,
    I: Fn() -> S + Sync,
    F: Fn(&mut S, usize) -> T + Sync,
{
    let items = out.len();
    let workers = effective_workers(workers, items);
    if workers <= 1 {
        let mut scratch = init();
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = f(&mut scratch, i);
        }
        return;
    }
    #[cfg(feature = "std")]
    std::thread::scope(|scope| {
        let mut rest = out;
        for w in 0..workers {
            let range = block(items, workers, w);
            let (mine, tail) = rest.split_at_mut(range.len());
            rest = tail;
            let (init, f) = (&init, &f);
            scope.spawn(move || {
                let mut scratch = init();
                for (slot, i) in mine.iter_mut().zip(range) {
                    *slot = f(&mut scratch, i);
                }
            });
        }
    });
}

/// Map `f` over `0..items`, returning results in index order.
pub fn map_indexed<T, F>(items: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let mut out: Vec<Option<T>> = (0..items).map(|_| None).collect();
    fill_indexed(&mut out, workers, || (), |_, i| Some(f(i)));
    out.into_iter().map(|x| x.expect("every slot is filled")).collect()
}
