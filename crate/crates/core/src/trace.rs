//! Convergence traces and solve reports shared by the coordinate solvers and FISTA.

use std::time::Instant;

use crate::matrix::Vector;

/// One trace sample. `epoch` is measured in units of `n` coordinate updates
/// (or one full-gradient iteration for FISTA); `residual` is whatever the
/// producing solver stops on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow {
    pub epoch: f64,
    pub updates: u64,
    pub time_sec: f64,
    pub objective: f64,
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub x: Vector,
    pub objective: f64,
    /// KKT residual at `x`, from an exactly recomputed gradient.
    pub delta: f64,
    pub updates: u64,
    pub converged: bool,
    pub trace: Vec<TraceRow>,
    /// Instrumented floating-point operation count for the whole solve.
    pub flops: u64,
}

impl SolveReport {
    pub fn epochs(&self) -> f64 {
        self.trace.last().map_or(0.0, |r| r.epoch)
    }
}

/// Accumulates the objective as `F(x⁰) + Σ decreases` so the traced values are
/// nonincreasing by construction, and samples a row once per epoch.
pub(crate) struct Recorder {
    start: Instant,
    epoch_len: u64,
    f0: f64,
    decrease: f64,
    rows: Vec<TraceRow>,
}

impl Recorder {
    pub(crate) fn new(epoch_len: usize, f0: f64) -> Self {
        Self {
            start: Instant::now(),
            epoch_len: epoch_len.max(1) as u64,
            f0,
            decrease: 0.0,
            rows: Vec::new(),
        }
    }

    #[inline]
    pub(crate) fn add_decrease(&mut self, dec: f64) {
        debug_assert!(dec <= 0.0);
        self.decrease += dec;
    }

    pub(crate) fn objective(&self) -> f64 {
        self.f0 + self.decrease
    }

    #[inline]
    pub(crate) fn at_epoch_boundary(&self, updates: u64) -> bool {
        updates.is_multiple_of(self.epoch_len)
    }

    pub(crate) fn push(&mut self, updates: u64, residual: f64) {
        if self.rows.last().is_some_and(|r| r.updates == updates) {
            return;
        }
        let row = TraceRow {
            epoch: updates as f64 / self.epoch_len as f64,
            updates,
            time_sec: self.start.elapsed().as_secs_f64(),
            objective: self.objective(),
            residual,
        };
        self.rows.push(row);
    }

    pub(crate) fn finish(self) -> Vec<TraceRow> {
        self.rows
    }
}
