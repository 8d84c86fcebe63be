//! Ground-truth Fibonacci values and exactness scans for the approximate
//! algorithms.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::algorithms::{evaluate_value, AlgorithmId, EvalConfig, PowMethod};
use crate::error::FibError;

/// Reference `F_n`.
///
/// Kept as a separate two-variable loop rather than calling into the
/// algorithms, so nothing under test can validate itself.
pub fn oracle_fib(n: u64) -> BigInt {
    let mut prev = BigInt::zero();
    let mut curr = BigInt::one();
    for _ in 0..n {
        let next = &prev + &curr;
        prev = std::mem::replace(&mut curr, next);
    }
    prev
}

/// `F_0 ..= F_max` in one pass.
pub fn oracle_table(max: u64) -> Vec<BigInt> {
    let mut table = Vec::with_capacity(max as usize + 1);
    table.push(BigInt::zero());
    if max >= 1 {
        table.push(BigInt::one());
    }
    for i in 2..=max as usize {
        let next = &table[i - 1] + &table[i - 2];
        table.push(next);
    }
    table
}

/// Predicted bit length of `F_n`, from `F_n ~ phi^n / sqrt(5)`.
///
/// This is an estimate; floating-point error makes it unreliable once
/// `n lg phi` no longer fits comfortably in a double.
pub fn estimate_bits(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let sqrt5 = 5f64.sqrt();
    let lg_phi = ((1.0 + sqrt5) / 2.0).log2();
    (n as f64 * lg_phi - sqrt5.log2()).floor() as u64 + 1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactnessReport {
    pub algorithm: AlgorithmId,
    pub first_inexact_n: Option<u64>,
    pub first_failed_n: Option<u64>,
    pub scanned_max: u64,
}

impl ExactnessReport {
    /// Largest `n` through which every scanned value matched the oracle.
    pub fn exact_through(&self) -> u64 {
        match (self.first_inexact_n, self.first_failed_n) {
            (Some(a), Some(b)) => a.min(b).saturating_sub(1),
            (Some(a), None) | (None, Some(a)) => a.saturating_sub(1),
            (None, None) => self.scanned_max,
        }
    }
}

/// Compare `algo` with the oracle for `n = 0..=max_n`, in ascending order.
///
/// The scan stops at the first failed invocation. Exponential-time
/// algorithms are only scanned up to their safe ceiling.
pub fn scan_exactness(algo: AlgorithmId, max_n: u64, config: &EvalConfig) -> ExactnessReport {
    let scanned_max = match algo.descriptor().max_safe_n {
        Some(cap) if algo == AlgorithmId::Fib1 => max_n.min(cap),
        _ => max_n,
    };

    let mut first_inexact_n = None;
    let mut first_failed_n = None;
    let mut expected = BigInt::zero();
    let mut following = BigInt::one();

    for n in 0..=scanned_max {
        match evaluate_value(algo, n, config) {
            Ok(value) => {
                if first_inexact_n.is_none() && value != expected {
                    first_inexact_n = Some(n);
                }
            }
            Err(err) => {
                debug_assert!(err.failure().is_some(), "unexpected error {err}");
                first_failed_n = Some(n);
                break;
            }
        }
        let next = &expected + &following;
        expected = std::mem::replace(&mut following, next);
    }

    ExactnessReport {
        algorithm: algo,
        first_inexact_n,
        first_failed_n,
        scanned_max,
    }
}

/// Scan range used to measure a threshold; far past binary64 overflow.
const THRESHOLD_SCAN_MAX: u64 = 2000;

static THRESHOLDS: [[OnceLock<u64>; 2]; 3] = [const { [const { OnceLock::new() }; 2] }; 3];

fn threshold_slot(algo: AlgorithmId, pow: PowMethod) -> Option<&'static OnceLock<u64>> {
    let row = match algo {
        AlgorithmId::Fib4 => 0,
        AlgorithmId::Fib5 => 1,
        AlgorithmId::Fib12 => 2,
        _ => return None,
    };
    let col = match pow {
        PowMethod::Native => 0,
        PowMethod::RepeatedSquaring => 1,
    };
    Some(&THRESHOLDS[row][col])
}

/// Measured exact-through index for an approximate algorithm, or `None`
/// for exact ones. Measured once per (algorithm, power method) and cached.
pub fn measured_exact_through(algo: AlgorithmId, pow: PowMethod) -> Option<u64> {
    let slot = threshold_slot(algo, pow)?;
    Some(*slot.get_or_init(|| {
        let config = EvalConfig {
            pow,
            ..EvalConfig::default()
        };
        scan_exactness(algo, THRESHOLD_SCAN_MAX, &config).exact_through()
    }))
}

/// Measure every approximate algorithm's threshold now, so no later
/// invocation pays for the scan.
pub fn prime_thresholds(pow: PowMethod) {
    for algo in [AlgorithmId::Fib4, AlgorithmId::Fib5, AlgorithmId::Fib12] {
        measured_exact_through(algo, pow);
    }
}

/// Store a threshold from an externally run scan. Only the first write for
/// a given slot takes effect; returns whether this call wrote it.
pub fn record_threshold(report: &ExactnessReport, pow: PowMethod) -> Result<bool, FibError> {
    let slot = threshold_slot(report.algorithm, pow)
        .ok_or_else(|| FibError::UnknownAlgorithm(format!("{} has no threshold", report.algorithm)))?;
    // a scan that never diverged says nothing about where the threshold is
    if report.first_inexact_n.is_none() && report.first_failed_n.is_none() {
        return Ok(false);
    }
    Ok(slot.set(report.exact_through()).is_ok())
}
