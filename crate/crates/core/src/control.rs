use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;

/// How often long-running searches look at the cancellation flag, in
/// expanded states.
pub const POLL_INTERVAL: u64 = 1024;

/// Cancellation flag and progress counter shared between a running
/// computation and its owner. Cloning shares the same flag and counter.
#[derive(Debug, Clone, Default)]
pub struct Control {
    canceled: Arc<AtomicBool>,
    progress: Arc<AtomicU64>,
}

impl Control {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cancel(&self) {
        self.canceled.store(true, Ordering::SeqCst);
    }

    pub fn is_canceled(&self) -> bool {
        self.canceled.load(Ordering::SeqCst)
    }

    /// Number of states expanded so far.
    pub fn progress(&self) -> u64 {
        self.progress.load(Ordering::Relaxed)
    }

    pub fn set_progress(&self, expanded: u64) {
        self.progress.store(expanded, Ordering::Relaxed);
    }

    /// Publishes `expanded` and reports whether to stop. Only consults the
    /// flag every [`POLL_INTERVAL`] states.
    pub fn tick(&self, expanded: u64) -> bool {
        if expanded.is_multiple_of(POLL_INTERVAL) {
            self.set_progress(expanded);
            self.is_canceled()
        } else {
            false
        }
    }
}
