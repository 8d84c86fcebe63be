//! The twelve Fibonacci algorithms, their registry metadata and the
//! signed-index wrapper.
//!
//! Every `fibN` takes the index and an [`EvalConfig`] and returns a
//! [`FibOutcome`]. Memo tables live for a single top-level call.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Float, One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{DepthGuard, FibError, Failure};
use crate::helpers::{
    float_to_bigint, mat_mul_opt_in_place, mat_pow_iter, mat_pow_recur, negafib, num_pow_iter,
    on_stack, round_half_away, GoldenConstants, Mat2,
};
use crate::oracle::measured_exact_through;

/// Default recursion guard, matching CPython's default recursion limit.
pub const DEFAULT_MAX_DEPTH: usize = 1000;

/// Environment variable overriding [`DEFAULT_MAX_DEPTH`].
pub const DEPTH_LIMIT_ENV: &str = "FIBBENCH_DEPTH_LIMIT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmId {
    Fib1,
    Fib2,
    Fib3,
    Fib4,
    Fib5,
    Fib6,
    Fib7,
    Fib8,
    Fib9,
    Fib10,
    Fib11,
    Fib12,
}

impl AlgorithmId {
    pub const ALL: [AlgorithmId; 12] = [
        AlgorithmId::Fib1,
        AlgorithmId::Fib2,
        AlgorithmId::Fib3,
        AlgorithmId::Fib4,
        AlgorithmId::Fib5,
        AlgorithmId::Fib6,
        AlgorithmId::Fib7,
        AlgorithmId::Fib8,
        AlgorithmId::Fib9,
        AlgorithmId::Fib10,
        AlgorithmId::Fib11,
        AlgorithmId::Fib12,
    ];

    /// 1-based number, as in `fib7`.
    pub fn number(self) -> usize {
        self as usize + 1
    }

    pub fn name(self) -> &'static str {
        self.descriptor().name
    }

    pub fn descriptor(self) -> &'static AlgorithmDescriptor {
        &REGISTRY[self as usize]
    }

    pub fn is_approximate(self) -> bool {
        self.descriptor().exactness == ExactnessClass::ApproximateBeyondThreshold
    }
}

impl fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AlgorithmId {
    type Err = FibError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lowered = s.trim().to_ascii_lowercase();
        AlgorithmId::ALL
            .into_iter()
            .find(|id| id.name() == lowered)
            .ok_or_else(|| FibError::UnknownAlgorithm(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExactnessClass {
    Exact,
    ApproximateBeyondThreshold,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RecursionClass {
    Recursive,
    Iterative,
    ClosedForm,
}

/// Asymptotic cost tag. Static metadata only; nothing is computed from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Complexity {
    Constant,
    Logarithmic,
    Linear,
    Quadratic,
    Exponential,
}

impl fmt::Display for Complexity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Complexity::Constant => "O(1)",
            Complexity::Logarithmic => "O(lg n)",
            Complexity::Linear => "O(n)",
            Complexity::Quadratic => "O(n²)",
            Complexity::Exponential => "O(φⁿ)",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AlgorithmDescriptor {
    pub id: AlgorithmId,
    pub name: &'static str,
    pub summary: &'static str,
    pub exactness: ExactnessClass,
    pub recursion: RecursionClass,
    /// Runtime counting each arithmetic operation as O(1).
    pub time_const_arith: Complexity,
    /// Runtime in bit operations.
    pub time_bit_ops: Complexity,
    /// Depth- or float-imposed ceiling on `n`, when there is one.
    pub max_safe_n: Option<u64>,
}

#[allow(clippy::too_many_arguments)]
const fn entry(
    id: AlgorithmId,
    name: &'static str,
    summary: &'static str,
    exactness: ExactnessClass,
    recursion: RecursionClass,
    time_const_arith: Complexity,
    time_bit_ops: Complexity,
    max_safe_n: Option<u64>,
) -> AlgorithmDescriptor {
    AlgorithmDescriptor {
        id,
        name,
        summary,
        exactness,
        recursion,
        time_const_arith,
        time_bit_ops,
        max_safe_n,
    }
}

use Complexity::{Constant, Exponential, Linear, Logarithmic, Quadratic};
use ExactnessClass::{ApproximateBeyondThreshold as Approx, Exact as Exactly};
use RecursionClass::{ClosedForm, Iterative, Recursive};

pub static REGISTRY: [AlgorithmDescriptor; 12] = [
    entry(AlgorithmId::Fib1, "fib1", "naive double recursion", Exactly, Recursive, Exponential, Exponential, Some(40)),
    entry(AlgorithmId::Fib2, "fib2", "recursion with memoization", Exactly, Recursive, Linear, Quadratic, Some(900)),
    entry(AlgorithmId::Fib3, "fib3", "iteration in constant space", Exactly, Iterative, Linear, Quadratic, None),
    entry(AlgorithmId::Fib4, "fib4", "closed form (phi^n - psi^n)/sqrt5", Approx, ClosedForm, Constant, Constant, Some(1474)),
    entry(AlgorithmId::Fib5, "fib5", "closed form round(phi^n/sqrt5)", Approx, ClosedForm, Constant, Constant, Some(1474)),
    entry(AlgorithmId::Fib6, "fib6", "linear walk over powers of Q", Exactly, Iterative, Linear, Quadratic, None),
    entry(AlgorithmId::Fib7, "fib7", "Q-matrix power, recursive squaring", Exactly, Recursive, Logarithmic, Linear, None),
    entry(AlgorithmId::Fib8, "fib8", "Q-matrix power, iterative squaring", Exactly, Iterative, Logarithmic, Linear, None),
    entry(AlgorithmId::Fib9, "fib9", "doubling identities, top-down memo", Exactly, Recursive, Logarithmic, Linear, None),
    entry(AlgorithmId::Fib10, "fib10", "doubling identities, marked bottom-up fill", Exactly, Iterative, Logarithmic, Linear, None),
    entry(AlgorithmId::Fib11, "fib11", "alternate doubling identities, memoized", Exactly, Recursive, Logarithmic, Linear, None),
    entry(AlgorithmId::Fib12, "fib12", "running round(phi * F_{n-1})", Approx, Iterative, Linear, Quadratic, Some(1476)),
];

/// How the closed-form algorithms raise phi and psi to the n-th power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PowMethod {
    /// The platform `pow`.
    #[default]
    Native,
    /// [`num_pow_iter`].
    RepeatedSquaring,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalConfig {
    pub max_depth: usize,
    pub pow: PowMethod,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            max_depth: DEFAULT_MAX_DEPTH,
            pow: PowMethod::Native,
        }
    }
}

impl EvalConfig {
    /// Defaults, with the depth limit taken from `FIBBENCH_DEPTH_LIMIT` when set.
    pub fn from_env() -> Self {
        let max_depth = std::env::var(DEPTH_LIMIT_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_MAX_DEPTH);
        Self {
            max_depth,
            ..Self::default()
        }
    }

    pub fn with_max_depth(self, max_depth: usize) -> Self {
        Self { max_depth, ..self }
    }

    fn guard(&self) -> DepthGuard {
        DepthGuard::new(self.max_depth)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Status {
    Exact,
    Approximate,
    Failed,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Exact => "Exact",
            Status::Approximate => "Approximate",
            Status::Failed => "Failed",
        })
    }
}

/// Result of one algorithm invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FibOutcome {
    Exact(BigInt),
    Approximate(BigInt),
    Failed(Failure),
}

impl FibOutcome {
    pub fn status(&self) -> Status {
        match self {
            FibOutcome::Exact(_) => Status::Exact,
            FibOutcome::Approximate(_) => Status::Approximate,
            FibOutcome::Failed(_) => Status::Failed,
        }
    }

    pub fn value(&self) -> Option<&BigInt> {
        match self {
            FibOutcome::Exact(v) | FibOutcome::Approximate(v) => Some(v),
            FibOutcome::Failed(_) => None,
        }
    }

    pub fn into_value(self) -> Option<BigInt> {
        match self {
            FibOutcome::Exact(v) | FibOutcome::Approximate(v) => Some(v),
            FibOutcome::Failed(_) => None,
        }
    }

    pub fn failure(&self) -> Option<Failure> {
        match self {
            FibOutcome::Failed(f) => Some(*f),
            _ => None,
        }
    }

    pub fn is_failed(&self) -> bool {
        matches!(self, FibOutcome::Failed(_))
    }

    fn map_value(self, f: impl FnOnce(BigInt) -> BigInt) -> Self {
        match self {
            FibOutcome::Exact(v) => FibOutcome::Exact(f(v)),
            FibOutcome::Approximate(v) => FibOutcome::Approximate(f(v)),
            failed => failed,
        }
    }
}

impl fmt::Display for FibOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FibOutcome::Exact(v) => write!(f, "{v} (Exact)"),
            FibOutcome::Approximate(v) => write!(f, "{v} (Approximate)"),
            FibOutcome::Failed(reason) => write!(f, "Failed ({reason})"),
        }
    }
}

/// Cache of computed values, keyed by index. One per top-level call.
#[derive(Debug, Default, Clone)]
pub struct MemoTable {
    cells: HashMap<u64, BigInt>,
}

impl MemoTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Table preloaded with `F_0`, `F_1` and `F_2`.
    pub fn with_base_values() -> Self {
        let mut table = Self::new();
        table.insert(0, BigInt::zero());
        table.insert(1, BigInt::one());
        table.insert(2, BigInt::one());
        table
    }

    pub fn get(&self, index: u64) -> Option<&BigInt> {
        self.cells.get(&index)
    }

    pub fn contains(&self, index: u64) -> bool {
        self.cells.contains_key(&index)
    }

    pub fn insert(&mut self, index: u64, value: BigInt) {
        self.cells.insert(index, value);
    }

    pub fn take(&mut self, index: u64) -> Option<BigInt> {
        self.cells.remove(&index)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &BigInt)> {
        self.cells.iter().map(|(k, v)| (*k, v))
    }

    fn cell(&self, index: u64) -> &BigInt {
        &self.cells[&index]
    }
}

fn exact(result: Result<BigInt, FibError>) -> FibOutcome {
    match result {
        Ok(v) => FibOutcome::Exact(v),
        Err(e) => FibOutcome::Failed(e.failure().expect("algorithms only fail with outcome-level errors")),
    }
}

fn approximate(algo: AlgorithmId, n: u64, config: &EvalConfig, result: Result<BigInt, FibError>) -> FibOutcome {
    match result {
        Ok(v) => match measured_exact_through(algo, config.pow) {
            Some(limit) if n > limit => FibOutcome::Approximate(v),
            _ => FibOutcome::Exact(v),
        },
        Err(e) => FibOutcome::Failed(e.failure().unwrap_or(Failure::FloatOverflow)),
    }
}

pub fn fib1(n: u64, config: &EvalConfig) -> FibOutcome {
    fn go(n: u64, guard: &mut DepthGuard) -> Result<BigInt, FibError> {
        guard.enter()?;
        let value = if n < 2 {
            BigInt::from(n)
        } else {
            on_stack(|| go(n - 1, guard))? + on_stack(|| go(n - 2, guard))?
        };
        guard.leave();
        Ok(value)
    }
    exact(go(n, &mut config.guard()))
}

pub fn fib2(n: u64, config: &EvalConfig) -> FibOutcome {
    // fills memo[n]; the caller's frame reads it back by reference
    fn fill(n: u64, memo: &mut MemoTable, guard: &mut DepthGuard) -> Result<(), FibError> {
        if memo.contains(n) {
            return Ok(());
        }
        guard.enter()?;
        let value = if n < 2 {
            BigInt::from(n)
        } else {
            on_stack(|| fill(n - 1, memo, guard))?;
            fill(n - 2, memo, guard)?;
            memo.cell(n - 1) + memo.cell(n - 2)
        };
        memo.insert(n, value);
        guard.leave();
        Ok(())
    }
    let mut memo = MemoTable::new();
    exact(fill(n, &mut memo, &mut config.guard()).map(|()| memo.take(n).unwrap()))
}

pub fn fib3(n: u64, _config: &EvalConfig) -> FibOutcome {
    let (mut a, mut b) = (BigInt::zero(), BigInt::one());
    for _ in 0..n {
        a += &b;
        std::mem::swap(&mut a, &mut b);
    }
    FibOutcome::Exact(a)
}

fn float_pow<T: Float>(base: T, n: u64, method: PowMethod) -> Result<T, FibError> {
    let value = match method {
        PowMethod::Native => base.powf(num_traits::cast::<u64, T>(n).ok_or(FibError::FloatOverflow)?),
        PowMethod::RepeatedSquaring => num_pow_iter(base, n)?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(FibError::FloatOverflow)
    }
}

/// `round((phi^n - psi^n) / sqrt5)` evaluated in `T`.
pub fn binet<T: Float>(n: u64, pow: PowMethod) -> Result<BigInt, FibError> {
    let c = GoldenConstants::<T>::new();
    let phi_n = float_pow(c.phi, n, pow)?;
    let psi_n = float_pow(c.psi, n, pow)?;
    round_half_away((phi_n - psi_n) / c.sqrt5)
}

/// `round(phi^n / sqrt5)` evaluated in `T`.
pub fn binet_rounded<T: Float>(n: u64, pow: PowMethod) -> Result<BigInt, FibError> {
    let c = GoldenConstants::<T>::new();
    round_half_away(float_pow(c.phi, n, pow)? / c.sqrt5)
}

/// `F_n = round(phi * F_{n-1})` from `n = 3` upward, carrying a `T`.
pub fn golden_walk<T: Float>(n: u64) -> Result<BigInt, FibError> {
    if n < 3 {
        return Ok(BigInt::from(u64::from(n > 0)));
    }
    let phi = GoldenConstants::<T>::new().phi;
    let mut running = T::one();
    for _ in 3..=n {
        running = (phi * running).round();
        if !running.is_finite() {
            return Err(FibError::FloatOverflow);
        }
    }
    float_to_bigint(running)
}

pub fn fib4(n: u64, config: &EvalConfig) -> FibOutcome {
    approximate(AlgorithmId::Fib4, n, config, binet::<f64>(n, config.pow))
}

pub fn fib5(n: u64, config: &EvalConfig) -> FibOutcome {
    approximate(AlgorithmId::Fib5, n, config, binet_rounded::<f64>(n, config.pow))
}

pub fn fib6(n: u64, _config: &EvalConfig) -> FibOutcome {
    if n < 2 {
        return FibOutcome::Exact(BigInt::from(n));
    }
    let mut m = Mat2::<BigInt>::q();
    for _ in 2..n {
        mat_mul_opt_in_place(&mut m);
    }
    FibOutcome::Exact(m.m00)
}

pub fn fib7(n: u64, config: &EvalConfig) -> FibOutcome {
    if n == 0 {
        return FibOutcome::Exact(BigInt::zero());
    }
    exact(mat_pow_recur(&Mat2::<BigInt>::q(), n - 1, &mut config.guard()).map(|m| m.m00))
}

pub fn fib8(n: u64, _config: &EvalConfig) -> FibOutcome {
    if n == 0 {
        return FibOutcome::Exact(BigInt::zero());
    }
    FibOutcome::Exact(mat_pow_iter(&Mat2::<BigInt>::q(), n - 1).m00)
}

/// `F_{2k+1} = F_{k+1}^2 + F_k^2`
fn doubling_odd(fk: &BigInt, fk1: &BigInt) -> BigInt {
    fk1 * fk1 + fk * fk
}

/// `F_{2k} = 2 F_{k+1} F_k - F_k^2`
fn doubling_even(fk: &BigInt, fk1: &BigInt) -> BigInt {
    ((fk1 * fk) << 1u32) - fk * fk
}

/// `F_{2k} = F_k^2 + 2 F_{k-1} F_k`
fn doubling_even_alt(fk_minus1: &BigInt, fk: &BigInt) -> BigInt {
    fk * fk + ((fk_minus1 * fk) << 1u32)
}

pub fn fib9(n: u64, config: &EvalConfig) -> FibOutcome {
    fn fill(m: u64, memo: &mut MemoTable, guard: &mut DepthGuard) -> Result<(), FibError> {
        if memo.contains(m) {
            return Ok(());
        }
        guard.enter()?;
        let k = m / 2;
        on_stack(|| fill(k, memo, guard))?;
        on_stack(|| fill(k + 1, memo, guard))?;
        let (fk, fk1) = (memo.cell(k), memo.cell(k + 1));
        let value = if m % 2 == 1 {
            doubling_odd(fk, fk1)
        } else {
            doubling_even(fk, fk1)
        };
        memo.insert(m, value);
        guard.leave();
        Ok(())
    }
    let mut memo = MemoTable::with_base_values();
    exact(fill(n, &mut memo, &mut config.guard()).map(|()| memo.take(n).unwrap()))
}

/// Indices above the base cases that fib10 fills for `F_n`, found by the
/// queue-driven marking phase.
pub fn doubling_marks(n: u64) -> BTreeSet<u64> {
    let mut marked = BTreeSet::new();
    let mut queue = VecDeque::from([n]);
    while let Some(m) = queue.pop_front() {
        if m <= 2 || !marked.insert(m) {
            continue;
        }
        let k = m / 2;
        queue.push_back(k);
        queue.push_back(k + 1);
    }
    marked
}

pub fn fib10(n: u64, _config: &EvalConfig) -> FibOutcome {
    let mut memo = MemoTable::with_base_values();
    for m in doubling_marks(n) {
        let k = m / 2;
        let (fk, fk1) = (memo.cell(k), memo.cell(k + 1));
        let value = if m % 2 == 1 {
            doubling_odd(fk, fk1)
        } else {
            doubling_even(fk, fk1)
        };
        memo.insert(m, value);
    }
    FibOutcome::Exact(memo.take(n).unwrap())
}

pub fn fib11(n: u64, config: &EvalConfig) -> FibOutcome {
    fn fill(m: u64, memo: &mut MemoTable, guard: &mut DepthGuard) -> Result<(), FibError> {
        if memo.contains(m) {
            return Ok(());
        }
        guard.enter()?;
        let k = m / 2;
        let value = if m % 2 == 1 {
            on_stack(|| fill(k, memo, guard))?;
            on_stack(|| fill(k + 1, memo, guard))?;
            doubling_odd(memo.cell(k), memo.cell(k + 1))
        } else {
            // m > 2 here, so k >= 2 and k - 1 never drops below the base cases
            on_stack(|| fill(k - 1, memo, guard))?;
            on_stack(|| fill(k, memo, guard))?;
            doubling_even_alt(memo.cell(k - 1), memo.cell(k))
        };
        memo.insert(m, value);
        guard.leave();
        Ok(())
    }
    let mut memo = MemoTable::with_base_values();
    exact(fill(n, &mut memo, &mut config.guard()).map(|()| memo.take(n).unwrap()))
}

pub fn fib12(n: u64, config: &EvalConfig) -> FibOutcome {
    approximate(AlgorithmId::Fib12, n, config, golden_walk::<f64>(n))
}

pub type AlgorithmFn = fn(u64, &EvalConfig) -> FibOutcome;

impl AlgorithmId {
    pub fn function(self) -> AlgorithmFn {
        match self {
            AlgorithmId::Fib1 => fib1,
            AlgorithmId::Fib2 => fib2,
            AlgorithmId::Fib3 => fib3,
            AlgorithmId::Fib4 => fib4,
            AlgorithmId::Fib5 => fib5,
            AlgorithmId::Fib6 => fib6,
            AlgorithmId::Fib7 => fib7,
            AlgorithmId::Fib8 => fib8,
            AlgorithmId::Fib9 => fib9,
            AlgorithmId::Fib10 => fib10,
            AlgorithmId::Fib11 => fib11,
            AlgorithmId::Fib12 => fib12,
        }
    }

    pub fn evaluate(self, n: u64, config: &EvalConfig) -> FibOutcome {
        (self.function())(n, config)
    }
}

/// Raw value of an algorithm, with no exactness classification. Used by the
/// exactness scan, which is what produces the classification thresholds.
pub(crate) fn evaluate_value(algo: AlgorithmId, n: u64, config: &EvalConfig) -> Result<BigInt, FibError> {
    match algo {
        AlgorithmId::Fib4 => binet::<f64>(n, config.pow),
        AlgorithmId::Fib5 => binet_rounded::<f64>(n, config.pow),
        AlgorithmId::Fib12 => golden_walk::<f64>(n),
        exact_algo => match exact_algo.evaluate(n, config) {
            FibOutcome::Exact(v) | FibOutcome::Approximate(v) => Ok(v),
            FibOutcome::Failed(Failure::RecursionDepthExceeded) => {
                Err(FibError::RecursionDepthExceeded { limit: config.max_depth })
            }
            FibOutcome::Failed(Failure::FloatOverflow) => Err(FibError::FloatOverflow),
        },
    }
}

/// `F_n` for any signed `n`; negative indices go through [`negafib`].
pub fn fib_signed(algo: AlgorithmId, n: i64, config: &EvalConfig) -> FibOutcome {
    let magnitude = n.unsigned_abs();
    let outcome = algo.evaluate(magnitude, config);
    if n < 0 {
        outcome.map_value(|v| negafib(magnitude, v))
    } else {
        outcome
    }
}

/// [`fib_signed`] with the algorithm looked up by name.
pub fn fib_signed_by_name(name: &str, n: i64, config: &EvalConfig) -> Result<FibOutcome, FibError> {
    Ok(fib_signed(name.parse()?, n, config))
}
