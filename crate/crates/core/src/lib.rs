//! # fibbench-core
//!
//! Twelve ways to compute Fibonacci numbers, from naive double recursion
//! to fast doubling, plus an independent reference implementation, scans
//! that locate where the floating-point algorithms stop being exact, and a
//! repeat-timing harness reporting mean runtime and coefficient of
//! variation.
//!
//! ```
//! use fibbench_core::{fib_signed, AlgorithmId, EvalConfig, FibOutcome};
//!
//! let cfg = EvalConfig::default();
//! assert_eq!(AlgorithmId::Fib9.evaluate(9, &cfg), FibOutcome::Exact(34.into()));
//! assert_eq!(fib_signed(AlgorithmId::Fib3, -4, &cfg), FibOutcome::Exact((-3).into()));
//! ```
//!
//! Matrix helpers are generic over any num-traits ring and the float
//! kernels over any [`num_traits::Float`]; the registry itself runs on
//! [`BigInt`] and [`Float64`].

pub mod algorithms;
pub mod bench;
pub mod csv_io;
pub mod error;
pub mod helpers;
pub mod oracle;

pub use algorithms::{
    binet, binet_rounded, doubling_marks, fib1, fib10, fib11, fib12, fib2, fib3, fib4, fib5, fib6,
    fib7, fib8, fib9, fib_signed, fib_signed_by_name, golden_walk, AlgorithmDescriptor, AlgorithmId,
    Complexity, EvalConfig, ExactnessClass, FibOutcome, MemoTable, PowMethod, RecursionClass,
    Status, DEFAULT_MAX_DEPTH, DEPTH_LIMIT_ENV, REGISTRY,
};
pub use bench::{
    bench, bench_with, run_group, run_group_with, time_once, time_once_with, BenchRecord,
    ExperimentGroup, GroupId, GroupRun, MonotonicTimer, RankingSummary, SampleStats,
    ScriptedTimer, Timer,
};
pub use error::{DepthGuard, Failure, FibError, FloatOverflow};
pub use helpers::{
    mat_mul, mat_mul_opt, mat_pow_iter, mat_pow_recur, negafib, num_pow_iter, round_half_away,
    GoldenConstants, Mat2,
};
pub use num_bigint::BigInt;
pub use oracle::{estimate_bits, oracle_fib, oracle_table, scan_exactness, ExactnessReport};

/// The binary64 scalar the registry's float algorithms run on.
pub type Float64 = f64;
/// 2x2 matrix of arbitrary-precision integers.
pub type BigMat2 = Mat2<BigInt>;
/// Golden-ratio constants in binary64.
pub type GoldenF64 = GoldenConstants<f64>;
