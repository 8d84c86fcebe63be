//! Repeated-timing harness: per-(algorithm, n) statistics, the four
//! experiment groups and runtime rankings.
//!
//! Repetitions are batched per (algorithm, n) and timed strictly one at a
//! time on the calling thread.

use std::fmt;
use std::hint::black_box;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::algorithms::{AlgorithmId, EvalConfig};
use crate::error::FibError;
use crate::oracle::prime_thresholds;

/// Repetitions per (algorithm, n) in the full protocol.
pub const FULL_PROTOCOL_REPS: usize = 10_000;
/// Repetitions in the default desk-scale profile.
pub const DEFAULT_REPS: usize = 200;
/// Upper bound on records per group in the desk-scale profile.
pub const DEFAULT_MAX_RECORDS: usize = 2_000;

/// Source of durations for one timed invocation.
pub trait Timer {
    /// Runs `f` once and returns its result with the elapsed nanoseconds.
    fn time<R>(&mut self, f: impl FnOnce() -> R) -> (R, u64);
}

/// Monotonic wall clock.
#[derive(Debug, Default, Clone, Copy)]
pub struct MonotonicTimer;

impl Timer for MonotonicTimer {
    fn time<R>(&mut self, f: impl FnOnce() -> R) -> (R, u64) {
        let start = Instant::now();
        let out = f();
        let elapsed = start.elapsed().as_nanos();
        // below clock granularity a run can read as 0 ns
        (out, u64::try_from(elapsed).unwrap_or(u64::MAX).max(1))
    }
}

/// Replays a fixed list of durations, cycling when exhausted. The wrapped
/// closure still runs.
#[derive(Debug, Clone)]
pub struct ScriptedTimer {
    durations: Vec<u64>,
    next: usize,
}

impl ScriptedTimer {
    pub fn new(durations: impl Into<Vec<u64>>) -> Self {
        let durations = durations.into();
        assert!(!durations.is_empty(), "scripted timer needs at least one duration");
        Self { durations, next: 0 }
    }
}

impl Timer for ScriptedTimer {
    fn time<R>(&mut self, f: impl FnOnce() -> R) -> (R, u64) {
        let out = f();
        let d = self.durations[self.next % self.durations.len()];
        self.next += 1;
        (out, d)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub algo: AlgorithmId,
    pub n: u64,
    pub reps: usize,
    pub mean_ns: f64,
    pub stddev_ns: f64,
    pub cv: f64,
}

/// Mean, population standard deviation and coefficient of variation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleStats {
    pub mean: f64,
    pub stddev: f64,
    pub cv: f64,
}

impl SampleStats {
    pub fn from_samples(samples: &[u64]) -> Option<Self> {
        if samples.is_empty() {
            return None;
        }
        let count = samples.len() as f64;
        let total: u128 = samples.iter().map(|&s| u128::from(s)).sum();
        let mean = total as f64 / count;
        let variance = samples
            .iter()
            .map(|&s| {
                let d = s as f64 - mean;
                d * d
            })
            .sum::<f64>()
            / count;
        let stddev = variance.sqrt();
        let cv = if stddev == 0.0 || mean == 0.0 { 0.0 } else { stddev / mean };
        Some(Self { mean, stddev, cv })
    }
}

/// Time a single invocation with the monotonic clock.
pub fn time_once(algo: AlgorithmId, n: u64, config: &EvalConfig) -> Result<u64, FibError> {
    time_once_with(&mut MonotonicTimer, algo, n, config)
}

pub fn time_once_with<T: Timer>(
    timer: &mut T,
    algo: AlgorithmId,
    n: u64,
    config: &EvalConfig,
) -> Result<u64, FibError> {
    let f = algo.function();
    let (outcome, ns) = timer.time(|| black_box(f(black_box(n), config)));
    match outcome.failure() {
        Some(failure) => Err(FibError::InvalidSample { algo, n, failure }),
        None => Ok(ns),
    }
}

pub fn bench(algo: AlgorithmId, n: u64, reps: usize, config: &EvalConfig) -> Result<BenchRecord, FibError> {
    bench_with(&mut MonotonicTimer, algo, n, reps, config)
}

/// `reps` timed invocations of `algo` at `n`, no warm-up discarded.
pub fn bench_with<T: Timer>(
    timer: &mut T,
    algo: AlgorithmId,
    n: u64,
    reps: usize,
    config: &EvalConfig,
) -> Result<BenchRecord, FibError> {
    assert!(reps >= 1, "bench needs at least one repetition");
    // status classification must not run inside the timed region
    prime_thresholds(config.pow);
    let samples = (0..reps)
        .map(|_| time_once_with(timer, algo, n, config))
        .collect::<Result<Vec<_>, _>>()?;
    let stats = SampleStats::from_samples(&samples).expect("reps >= 1");
    Ok(BenchRecord {
        algo,
        n,
        reps,
        mean_ns: stats.mean,
        stddev_ns: stats.stddev,
        cv: stats.cv,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupId {
    G1,
    G2,
    G3,
    G4,
}

impl GroupId {
    pub const ALL: [GroupId; 4] = [GroupId::G1, GroupId::G2, GroupId::G3, GroupId::G4];

    pub fn group(self) -> ExperimentGroup {
        use AlgorithmId::*;
        let (n_max, algorithms): (u64, Vec<AlgorithmId>) = match self {
            GroupId::G1 => (30, AlgorithmId::ALL.to_vec()),
            GroupId::G2 => (70, AlgorithmId::ALL[1..].to_vec()),
            GroupId::G3 => (900, vec![Fib2, Fib3, Fib6, Fib7, Fib8, Fib9, Fib10, Fib11]),
            GroupId::G4 => (10_000, vec![Fib3, Fib6, Fib8, Fib10, Fib11]),
        };
        ExperimentGroup {
            id: Some(self),
            n_min: 0,
            n_max,
            algorithms,
        }
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupId::G1 => "g1",
            GroupId::G2 => "g2",
            GroupId::G3 => "g3",
            GroupId::G4 => "g4",
        })
    }
}

impl FromStr for GroupId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GroupId::ALL
            .into_iter()
            .find(|g| g.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown group `{s}` (expected g1, g2, g3 or g4)"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentGroup {
    /// `None` for an ad-hoc selection outside the four standard groups.
    pub id: Option<GroupId>,
    pub n_min: u64,
    pub n_max: u64,
    pub algorithms: Vec<AlgorithmId>,
}

impl ExperimentGroup {
    pub fn custom(n_min: u64, n_max: u64, algorithms: Vec<AlgorithmId>) -> Self {
        Self {
            id: None,
            n_min,
            n_max,
            algorithms,
        }
    }

    /// `n_min, n_min + step, ...` up to and including `n_max` when it lands
    /// on the grid.
    pub fn n_values(&self, n_step: u64) -> impl Iterator<Item = u64> {
        assert!(n_step >= 1, "n_step must be at least 1");
        (self.n_min..=self.n_max).step_by(n_step as usize)
    }

    pub fn record_count(&self, n_step: u64) -> usize {
        self.algorithms.len() * self.n_values(n_step).count()
    }

    /// Smallest step keeping the group at or under `max_records` records.
    pub fn step_for_budget(&self, max_records: usize) -> u64 {
        let width = self.n_max - self.n_min + 1;
        let per_algo = (max_records / self.algorithms.len().max(1)).max(1) as u64;
        width.div_ceil(per_algo).max(1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingSummary {
    pub group: Option<GroupId>,
    /// Fastest first, with each algorithm's summed mean runtime in ns.
    pub order: Vec<(AlgorithmId, f64)>,
    pub ratio_max_min: f64,
}

impl RankingSummary {
    /// Rank by the sum of mean runtimes across each algorithm's records.
    /// Ties keep registry order.
    pub fn from_records(group: Option<GroupId>, records: &[BenchRecord]) -> Self {
        let mut totals: Vec<(AlgorithmId, f64)> = Vec::new();
        for r in records {
            match totals.iter_mut().find(|(a, _)| *a == r.algo) {
                Some((_, t)) => *t += r.mean_ns,
                None => totals.push((r.algo, r.mean_ns)),
            }
        }
        totals.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        let ratio_max_min = match (totals.first(), totals.last()) {
            (Some(&(_, fastest)), Some(&(_, slowest))) if fastest > 0.0 => slowest / fastest,
            _ => 1.0,
        };
        Self {
            group,
            order: totals,
            ratio_max_min,
        }
    }

    pub fn fastest(&self) -> Option<AlgorithmId> {
        self.order.first().map(|(a, _)| *a)
    }

    pub fn slowest(&self) -> Option<AlgorithmId> {
        self.order.last().map(|(a, _)| *a)
    }
}

#[derive(Debug, Clone)]
pub struct GroupRun {
    pub records: Vec<BenchRecord>,
    pub ranking: RankingSummary,
}

pub fn run_group(group: &ExperimentGroup, reps: usize, n_step: u64, config: &EvalConfig) -> Result<GroupRun, FibError> {
    run_group_with(&mut MonotonicTimer, group, reps, n_step, config, |_| {})
}

/// Bench every (algorithm, n) pair of the group; `progress` sees each
/// record as it completes.
pub fn run_group_with<T: Timer>(
    timer: &mut T,
    group: &ExperimentGroup,
    reps: usize,
    n_step: u64,
    config: &EvalConfig,
    mut progress: impl FnMut(&BenchRecord),
) -> Result<GroupRun, FibError> {
    let mut records = Vec::with_capacity(group.record_count(n_step));
    for &algo in &group.algorithms {
        for n in group.n_values(n_step) {
            let record = bench_with(timer, algo, n, reps, config)?;
            progress(&record);
            records.push(record);
        }
    }
    let ranking = RankingSummary::from_records(group.id, &records);
    Ok(GroupRun { records, ranking })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> EvalConfig {
        EvalConfig::default()
    }

    #[test]
    fn time_once_is_positive() {
        assert!(time_once(AlgorithmId::Fib3, 0, &cfg()).unwrap() > 0);
        assert!(time_once(AlgorithmId::Fib10, 10_000, &cfg()).is_ok());
    }

    #[test]
    fn failed_outcome_invalidates_sample() {
        let err = time_once(AlgorithmId::Fib4, 1600, &cfg()).unwrap_err();
        assert!(matches!(err, FibError::InvalidSample { algo: AlgorithmId::Fib4, n: 1600, .. }));
        assert!(bench(AlgorithmId::Fib2, 5000, 3, &cfg()).is_err());
    }

    #[test]
    fn single_rep_has_zero_spread() {
        let r = bench(AlgorithmId::Fib3, 50, 1, &cfg()).unwrap();
        assert_eq!(r.reps, 1);
        assert_eq!(r.stddev_ns, 0.0);
        assert_eq!(r.cv, 0.0);
        assert!(r.mean_ns > 0.0);
    }

    #[test]
    fn scripted_statistics() {
        let mut flat = ScriptedTimer::new([10, 10, 10, 10]);
        let r = bench_with(&mut flat, AlgorithmId::Fib3, 5, 4, &cfg()).unwrap();
        assert_eq!((r.mean_ns, r.stddev_ns, r.cv), (10.0, 0.0, 0.0));

        let mut spread = ScriptedTimer::new([8, 12]);
        let r = bench_with(&mut spread, AlgorithmId::Fib3, 5, 2, &cfg()).unwrap();
        assert_eq!((r.mean_ns, r.stddev_ns, r.cv), (10.0, 2.0, 0.2));
    }

    #[test]
    fn stats_of_nothing() {
        assert_eq!(SampleStats::from_samples(&[]), None);
    }

    #[test]
    fn group_membership() {
        use AlgorithmId::*;
        let g1 = GroupId::G1.group();
        assert_eq!((g1.n_min, g1.n_max, g1.algorithms.len()), (0, 30, 12));
        let g2 = GroupId::G2.group();
        assert_eq!(g2.n_max, 70);
        assert!(!g2.algorithms.contains(&Fib1));
        assert_eq!(g2.algorithms.len(), 11);
        let g3 = GroupId::G3.group();
        assert_eq!(g3.n_max, 900);
        for excluded in [Fib1, Fib4, Fib5, Fib12] {
            assert!(!g3.algorithms.contains(&excluded));
        }
        assert_eq!(g3.algorithms.len(), 8);
        let g4 = GroupId::G4.group();
        assert_eq!(g4.n_max, 10_000);
        assert_eq!(g4.algorithms, [Fib3, Fib6, Fib8, Fib10, Fib11]);
    }

    #[test]
    fn n_grid_and_budget() {
        let g1 = GroupId::G1.group();
        assert_eq!(g1.n_values(5).collect::<Vec<_>>(), [0, 5, 10, 15, 20, 25, 30]);
        assert_eq!(g1.record_count(5), 84);
        for id in GroupId::ALL {
            let g = id.group();
            let step = g.step_for_budget(DEFAULT_MAX_RECORDS);
            assert!(g.record_count(step) <= DEFAULT_MAX_RECORDS, "{id}");
            if step > 1 {
                assert!(g.record_count(step - 1) > DEFAULT_MAX_RECORDS, "{id}");
            }
        }
        assert_eq!(GroupId::G1.group().step_for_budget(DEFAULT_MAX_RECORDS), 1);
    }

    #[test]
    fn run_group_counts_and_ranks() {
        let mut timer = ScriptedTimer::new([5]);
        let run = run_group_with(&mut timer, &GroupId::G1.group(), 2, 5, &cfg(), |_| {}).unwrap();
        assert_eq!(run.records.len(), 84);
        // all equal totals: ties fall back to registry order
        assert_eq!(run.ranking.fastest(), Some(AlgorithmId::Fib1));
        assert_eq!(run.ranking.slowest(), Some(AlgorithmId::Fib12));
        assert_eq!(run.ranking.ratio_max_min, 1.0);
        assert_eq!(run.ranking.group, Some(GroupId::G1));
    }

    #[test]
    fn ranking_sums_means() {
        let rec = |algo, mean_ns| BenchRecord {
            algo,
            n: 0,
            reps: 1,
            mean_ns,
            stddev_ns: 0.0,
            cv: 0.0,
        };
        let records = [
            rec(AlgorithmId::Fib6, 30.0),
            rec(AlgorithmId::Fib10, 2.0),
            rec(AlgorithmId::Fib6, 30.0),
            rec(AlgorithmId::Fib10, 4.0),
        ];
        let ranking = RankingSummary::from_records(None, &records);
        assert_eq!(ranking.order, [(AlgorithmId::Fib10, 6.0), (AlgorithmId::Fib6, 60.0)]);
        assert_eq!(ranking.ratio_max_min, 10.0);
    }

    #[test]
    fn group_ids_parse() {
        assert_eq!("G3".parse::<GroupId>().unwrap(), GroupId::G3);
        assert!("g5".parse::<GroupId>().is_err());
    }
}
