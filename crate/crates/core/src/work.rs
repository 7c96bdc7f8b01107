//! Per-thread count of numerical kernels started, so callers can check that
//! rejected inputs never reach the numerics.

use std::cell::Cell;

thread_local! {
    static STARTED: Cell<usize> = const { Cell::new(0) };
}

/// Kernels started on this thread so far.
pub fn count() -> usize {
    STARTED.with(|c| c.get())
}

pub(crate) fn tick() {
    STARTED.with(|c| c.set(c.get() + 1));
}
