//! Aggregated Monte-Carlo statistics.

use serde::Serialize;

use crate::error::{Error, Result};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// 95% Wilson score interval for `failures` successes out of `shots`.
pub fn wilson_interval(failures: u64, shots: u64) -> Result<(f64, f64)> {
    if shots == 0 {
        return Err(Error::InvalidParameter("wilson interval needs shots > 0".into()));
    }
    if failures > shots {
        return Err(Error::InvalidParameter(format!(
            "failures {failures} exceed shots {shots}"
        )));
    }
    let n = shots as f64;
    let p = failures as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if failures == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if failures == shots { 1.0 } else { (center + half).min(1.0) };
    Ok((lo, hi))
}

/// Counters accumulated over shots. Merging is a sum, so the result does
/// not depend on the order in which shots were processed.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RunStats {
    /// Shots requested.
    pub shots: u64,
    /// Shots that hit the restart cap; excluded from every other counter.
    pub aborts: u64,
    pub logical_failures: u64,
    /// Executed operations summed over completed shots.
    pub total_ops: u64,
    /// Sum of squared per-shot operation counts.
    pub total_ops_sq: f64,
    pub restarts: u64,
    /// Restarts per sub-circuit index.
    pub restart_histogram: Vec<u64>,
    /// Number of distinct qubits any operation touched.
    pub max_qubits: usize,
    /// Size of the logical circuit, the denominator of the gate overhead.
    pub logical_size: usize,
}

impl RunStats {
    pub fn new(logical_size: usize, max_qubits: usize, stages: usize) -> Self {
        Self {
            logical_size,
            max_qubits,
            restart_histogram: vec![0; stages],
            ..Self::default()
        }
    }

    pub fn completed(&self) -> u64 {
        self.shots - self.aborts
    }

    pub fn record(&mut self, ops: u64, failed: bool, restarts: &[u32], aborted: bool) {
        self.shots += 1;
        if aborted {
            self.aborts += 1;
            return;
        }
        self.total_ops += ops;
        self.total_ops_sq += (ops as f64) * (ops as f64);
        self.logical_failures += u64::from(failed);
        for (h, &r) in self.restart_histogram.iter_mut().zip(restarts) {
            *h += u64::from(r);
            self.restarts += u64::from(r);
        }
    }

    pub fn merge(mut self, other: RunStats) -> RunStats {
        self.shots += other.shots;
        self.aborts += other.aborts;
        self.logical_failures += other.logical_failures;
        self.total_ops += other.total_ops;
        self.total_ops_sq += other.total_ops_sq;
        self.restarts += other.restarts;
        if self.restart_histogram.len() < other.restart_histogram.len() {
            self.restart_histogram.resize(other.restart_histogram.len(), 0);
        }
        for (h, o) in self.restart_histogram.iter_mut().zip(&other.restart_histogram) {
            *h += o;
        }
        self.max_qubits = self.max_qubits.max(other.max_qubits);
        self.logical_size = self.logical_size.max(other.logical_size);
        self
    }

    /// Estimated logical error rate over completed shots.
    pub fn p_log(&self) -> f64 {
        match self.completed() {
            0 => 0.0,
            c => self.logical_failures as f64 / c as f64,
        }
    }

    pub fn wilson(&self) -> (f64, f64) {
        wilson_interval(self.logical_failures, self.completed()).unwrap_or((0.0, 1.0))
    }

    pub fn mean_ops(&self) -> f64 {
        match self.completed() {
            0 => 0.0,
            c => self.total_ops as f64 / c as f64,
        }
    }

    /// Standard error of [`mean_ops`](Self::mean_ops).
    pub fn ops_std_err(&self) -> f64 {
        let c = self.completed() as f64;
        if c < 2.0 {
            return 0.0;
        }
        let mean = self.mean_ops();
        let var = ((self.total_ops_sq / c) - mean * mean).max(0.0) * c / (c - 1.0);
        (var / c).sqrt()
    }

    /// Measured gate overhead: mean executed ops over the logical size.
    pub fn omega_g(&self) -> f64 {
        if self.logical_size == 0 {
            return 0.0;
        }
        self.mean_ops() / self.logical_size as f64
    }

    /// Restarts per completed shot.
    pub fn restart_rate(&self) -> f64 {
        match self.completed() {
            0 => 0.0,
            c => self.restarts as f64 / c as f64,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_edge_cases() {
        assert_eq!(wilson_interval(0, 100).unwrap().0, 0.0);
        assert_eq!(wilson_interval(100, 100).unwrap().1, 1.0);
        assert!(wilson_interval(0, 0).is_err());
        assert!(wilson_interval(3, 2).is_err());
        let (lo, hi) = wilson_interval(50, 100).unwrap();
        assert!(((lo + hi) / 2.0 - 0.5).abs() < 1e-9);
    }

    #[test]
    fn merge_is_a_sum() {
        let mut a = RunStats::new(10, 3, 2);
        a.record(12, true, &[1, 0], false);
        let mut b = RunStats::new(10, 3, 2);
        b.record(20, false, &[0, 2], false);
        b.record(0, false, &[], true);
        let m = a.clone().merge(b.clone());
        assert_eq!(m, b.merge(a));
        assert_eq!(m.shots, 3);
        assert_eq!(m.completed(), 2);
        assert_eq!(m.restart_histogram, vec![1, 2]);
        assert_eq!(m.restarts, 3);
        assert!((m.mean_ops() - 16.0).abs() < 1e-12);
        assert!((m.p_log() - 0.5).abs() < 1e-12);
        assert!((m.omega_g() - 1.6).abs() < 1e-12);
    }
}
