use crate::error::{Error, Result};

/// Largest scenario space enumerated without an explicit override.
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

/// Limits and parallelism for exhaustive computations.
///
/// Results never depend on `workers`; only wall-clock time does.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    /// Refuse to enumerate spaces larger than this.
    pub cap: u64,
    /// Worker threads; 0 uses the global rayon pool.
    pub workers: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            cap: DEFAULT_ENUMERATION_CAP,
            workers: 0,
        }
    }
}

impl SolveOptions {
    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub(crate) fn check_cap(&self, size: u64) -> Result<()> {
        if size > self.cap {
            return Err(Error::CapExceeded {
                size,
                cap: self.cap,
            });
        }
        Ok(())
    }

    pub(crate) fn install<R: Send>(&self, op: impl FnOnce() -> R + Send) -> Result<R> {
        if self.workers == 0 {
            return Ok(op());
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::Pool(e.to_string()))?;
        Ok(pool.install(op))
    }
}

/// Rank blocks handed to workers; each block is walked with an odometer.
pub(crate) const BLOCK: u64 = 4096;

pub(crate) fn block_count(size: u64) -> usize {
    usize::try_from(size.div_ceil(BLOCK)).expect("block count fits in usize")
}

pub(crate) fn block_bounds(block: usize, size: u64) -> (u64, u64) {
    let start = block as u64 * BLOCK;
    (start, (start + BLOCK).min(size))
}
