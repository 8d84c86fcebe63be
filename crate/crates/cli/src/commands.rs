use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use fibbench_core::bench::{DEFAULT_MAX_RECORDS, DEFAULT_REPS, FULL_PROTOCOL_REPS};
use fibbench_core::csv_io::{read_records, write_records, CsvError};
use fibbench_core::oracle::record_threshold;
use fibbench_core::{
    fib_signed, run_group_with, scan_exactness, AlgorithmId, BenchRecord, EvalConfig,
    ExperimentGroup, FibError, FibOutcome, GroupRun, MonotonicTimer, RankingSummary, Status,
};
use serde::Serialize;

use crate::args::{parse_selector, BenchArgs, ComputeArgs, Format, ReportArgs, ScanArgs};
use crate::svg::{LineChart, Series};

/// fib1 warns above this n and refuses above its registry ceiling.
const FIB1_WARN_N: u64 = 30;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Algorithm(String),
    Mismatch(usize),
    Csv(CsvError),
    Io(io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) | CliError::Csv(_) => 2,
            CliError::Algorithm(_) => 3,
            CliError::Mismatch(_) => 4,
        })
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Algorithm(msg) => f.write_str(msg),
            CliError::Mismatch(count) => write!(f, "{count} algorithm(s) disagree with the majority value"),
            CliError::Csv(e) => write!(f, "malformed bench CSV: {e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<FibError> for CliError {
    fn from(e: FibError) -> Self {
        match e {
            FibError::UnknownAlgorithm(_) => CliError::Usage(e.to_string()),
            other => CliError::Algorithm(other.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

fn check_fib1(n: u64, force: bool) -> Result<(), CliError> {
    let ceiling = AlgorithmId::Fib1.descriptor().max_safe_n.unwrap_or(u64::MAX);
    if n > ceiling && !force {
        return Err(CliError::Usage(format!(
            "fib1 takes exponential time; n = {n} is above its safe ceiling of {ceiling} (pass --force to run it anyway)"
        )));
    }
    if n > FIB1_WARN_N {
        eprintln!("warning: fib1 at n = {n} makes about 1.6^n calls and may run for a long time");
    }
    Ok(())
}

#[derive(Serialize)]
struct ComputeRow {
    algo: AlgorithmId,
    n: i64,
    status: Status,
    value: Option<String>,
    failure: Option<String>,
}

pub fn compute(args: &ComputeArgs, config: &EvalConfig) -> Result<(), CliError> {
    let selector = if args.all { "all" } else { args.algo.as_deref().unwrap_or("all") };
    let algos = parse_selector(selector)?;
    let table_mode = algos.len() > 1;
    let magnitude = args.n.unsigned_abs();

    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for &algo in &algos {
        if algo == AlgorithmId::Fib1 {
            if let Err(e) = check_fib1(magnitude, args.force) {
                if !table_mode {
                    return Err(e);
                }
                skipped.push(algo);
                continue;
            }
        }
        rows.push((algo, fib_signed(algo, args.n, config)));
    }

    let majority = majority_value(&rows);
    let mismatched: Vec<AlgorithmId> = rows
        .iter()
        .filter(|(_, o)| o.value().is_some_and(|v| Some(v) != majority.as_ref()))
        .map(|(a, _)| *a)
        .collect();
    let failed: Vec<AlgorithmId> = rows.iter().filter(|(_, o)| o.is_failed()).map(|(a, _)| *a).collect();

    let out = io::stdout();
    let mut out = out.lock();
    match args.format {
        Format::Json => {
            let json: Vec<ComputeRow> = rows
                .iter()
                .map(|(algo, o)| ComputeRow {
                    algo: *algo,
                    n: args.n,
                    status: o.status(),
                    value: o.value().map(ToString::to_string),
                    failure: o.failure().map(|f| f.to_string()),
                })
                .collect();
            let body = if table_mode {
                serde_json::to_string_pretty(&json)
            } else {
                serde_json::to_string_pretty(&json[0])
            };
            writeln!(out, "{}", body.expect("rows serialize"))?;
        }
        Format::Text => {
            if table_mode {
                writeln!(out, "{:<6} {:<12} value", "algo", "status")?;
                for (algo, o) in &rows {
                    let value = match o {
                        FibOutcome::Failed(f) => f.to_string(),
                        other => other.value().map(ToString::to_string).unwrap_or_default(),
                    };
                    let flag = if mismatched.contains(algo) { "  <- differs" } else { "" };
                    writeln!(out, "{:<6} {:<12} {value}{flag}", algo.name(), o.status().to_string())?;
                }
                for algo in &skipped {
                    writeln!(out, "{:<6} {:<12} n above safe ceiling, use --force", algo.name(), "Skipped")?;
                }
                let agreeing = rows.len() - failed.len() - mismatched.len();
                writeln!(
                    out,
                    "agreement: {agreeing} of {} values agree, {} mismatch(es), {} failure(s)",
                    rows.len() - failed.len(),
                    mismatched.len(),
                    failed.len()
                )?;
            } else {
                writeln!(out, "{}", rows[0].1)?;
            }
        }
        other => return Err(CliError::Usage(format!("compute does not support --format {other:?}"))),
    }

    if !failed.is_empty() {
        let names: Vec<_> = failed.iter().map(|a| a.name()).collect();
        return Err(CliError::Algorithm(format!("algorithm failure: {}", names.join(", "))));
    }
    if !mismatched.is_empty() {
        return Err(CliError::Mismatch(mismatched.len()));
    }
    Ok(())
}

/// Most common successful value; ties go to the earliest algorithm.
fn majority_value(rows: &[(AlgorithmId, FibOutcome)]) -> Option<fibbench_core::BigInt> {
    let values: Vec<_> = rows.iter().filter_map(|(_, o)| o.value()).collect();
    values
        .iter()
        .max_by_key(|v| (values.iter().filter(|w| w == v).count(), std::cmp::Reverse(values.iter().position(|w| w == *v))))
        .map(|v| (*v).clone())
}

pub fn bench(args: &BenchArgs, config: &EvalConfig) -> Result<(), CliError> {
    let group = match (&args.group, &args.algo) {
        (Some(id), _) => id.group(),
        (None, Some(selector)) => {
            let algorithms = parse_selector(selector)?;
            let (n_min, n_max) = match (args.n, args.n_max) {
                (Some(n), _) => (n, n),
                (None, Some(max)) => (args.n_min, max),
                (None, None) => return Err(CliError::Usage("explicit bench needs -n or --n-max".into())),
            };
            if n_min > n_max {
                return Err(CliError::Usage(format!("--n-min {n_min} is above --n-max {n_max}")));
            }
            let group = ExperimentGroup::custom(n_min, n_max, algorithms);
            if group.algorithms.contains(&AlgorithmId::Fib1) {
                check_fib1(n_max, args.force)?;
            }
            group
        }
        (None, None) => return Err(CliError::Usage("bench needs --group or --algo".into())),
    };

    let reps = args.reps.unwrap_or(if args.full { FULL_PROTOCOL_REPS } else { DEFAULT_REPS });
    if reps == 0 {
        return Err(CliError::Usage("--reps must be at least 1".into()));
    }
    let n_step = match args.n_step {
        Some(0) => return Err(CliError::Usage("--n-step must be at least 1".into())),
        Some(step) => step,
        None if args.full || group.id.is_none() => 1,
        None => group.step_for_budget(DEFAULT_MAX_RECORDS),
    };

    eprintln!(
        "benchmarking {} algorithm(s), n = {}..={} step {n_step}, {reps} reps each ({} records)",
        group.algorithms.len(),
        group.n_min,
        group.n_max,
        group.record_count(n_step)
    );
    let mut current = None;
    let GroupRun { records, ranking } = run_group_with(&mut MonotonicTimer, &group, reps, n_step, config, |r| {
        if current != Some(r.algo) {
            current = Some(r.algo);
            eprintln!("  {}", r.algo);
        }
    })?;

    let mut sink: Box<dyn Write> = match &args.output {
        Some(path) => Box::new(io::BufWriter::new(fs::File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    };
    match args.format {
        Format::Csv => write_records(&mut sink, &records, Some(&ranking)).map_err(|e| match e {
            CsvError::Io(io) => CliError::Io(io),
            other => CliError::Csv(other),
        })?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut sink, &records).map_err(io::Error::other)?;
            writeln!(sink)?;
        }
        other => return Err(CliError::Usage(format!("bench does not support --format {other:?}"))),
    }
    sink.flush()?;
    drop(sink);

    print_ranking(&ranking, args.output.is_some());
    Ok(())
}

fn print_ranking(ranking: &RankingSummary, to_stdout: bool) {
    let mut text = String::from("ranking by total mean runtime (fastest first):\n");
    for (i, (algo, total)) in ranking.order.iter().enumerate() {
        text.push_str(&format!("  {:>2}. {:<6} {:.4e} s\n", i + 1, algo.name(), total * 1e-9));
    }
    text.push_str(&format!("ratio slowest/fastest: {:.1}\n", ranking.ratio_max_min));
    if to_stdout {
        print!("{text}");
    } else {
        eprint!("{text}");
    }
}

pub fn scan(args: &ScanArgs, config: &EvalConfig) -> Result<(), CliError> {
    let algos = parse_selector(&args.algo)?;
    let reports: Vec<_> = algos.iter().map(|&a| scan_exactness(a, args.max_n, config)).collect();
    if args.record {
        for report in reports.iter().filter(|r| r.algorithm.is_approximate()) {
            record_threshold(report, config.pow)?;
        }
    }
    match args.format {
        Format::Json => {
            let body = if reports.len() == 1 {
                serde_json::to_string_pretty(&reports[0])
            } else {
                serde_json::to_string_pretty(&reports)
            };
            println!("{}", body.expect("reports serialize"));
        }
        Format::Text => {
            let show = |v: Option<u64>| v.map_or_else(|| "none".to_string(), |n| n.to_string());
            for r in &reports {
                println!(
                    "{}: first_inexact_n={} first_failed_n={} scanned_max={} exact_through={}",
                    r.algorithm,
                    show(r.first_inexact_n),
                    show(r.first_failed_n),
                    r.scanned_max,
                    r.exact_through()
                );
            }
        }
        other => return Err(CliError::Usage(format!("scan does not support --format {other:?}"))),
    }
    Ok(())
}

pub fn report(args: &ReportArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.input)?;
    let parsed = read_records(&text).map_err(CliError::Csv)?;

    let prefix = args
        .prefix
        .clone()
        .or_else(|| parsed.group.map(|g| g.to_string()))
        .unwrap_or_else(|| {
            args.input
                .file_stem()
                .map_or_else(|| "bench".to_string(), |s| s.to_string_lossy().into_owned())
        });
    let out_dir = args
        .out_dir
        .clone()
        .or_else(|| args.input.parent().map(Path::to_path_buf))
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&out_dir)?;

    let series = |value: fn(&BenchRecord) -> f64| -> Vec<Series> {
        parsed
            .algorithms()
            .into_iter()
            .map(|algo| Series {
                name: algo.to_string(),
                points: parsed
                    .records
                    .iter()
                    .filter(|r| r.algo == algo)
                    .map(|r| (r.n as f64, value(r)))
                    .collect(),
            })
            .collect()
    };
    let scope = parsed.group.map_or_else(String::new, |g| format!(" ({g})"));
    let runtime = LineChart {
        title: format!("Average runtime vs n{scope}"),
        x_label: "n".into(),
        y_label: "Average runtime (seconds)".into(),
        series: series(|r| r.mean_ns * 1e-9),
    };
    let cv = LineChart {
        title: format!("Coefficient of variation vs n{scope}"),
        x_label: "n".into(),
        y_label: "CV (stddev / mean)".into(),
        series: series(|r| r.cv),
    };

    for (suffix, chart) in [("runtime", runtime), ("cv", cv)] {
        let path = out_dir.join(format!("{prefix}_{suffix}.svg"));
        fs::write(&path, chart.render())?;
        println!("{}", path.display());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use fibbench_core::BigInt;

    #[test]
    fn majority_prefers_most_common_value() {
        let rows = vec![
            (AlgorithmId::Fib4, FibOutcome::Approximate(BigInt::from(7))),
            (AlgorithmId::Fib3, FibOutcome::Exact(BigInt::from(5))),
            (AlgorithmId::Fib8, FibOutcome::Exact(BigInt::from(5))),
        ];
        assert_eq!(majority_value(&rows), Some(BigInt::from(5)));
        assert_eq!(majority_value(&[]), None);
    }

    #[test]
    fn fib1_ceiling() {
        assert!(check_fib1(40, false).is_ok());
        assert!(matches!(check_fib1(41, false), Err(CliError::Usage(_))));
        assert!(check_fib1(41, true).is_ok());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Usage(String::new()).exit_code(), ExitCode::from(2));
        assert_eq!(CliError::Algorithm(String::new()).exit_code(), ExitCode::from(3));
        assert_eq!(CliError::Mismatch(1).exit_code(), ExitCode::from(4));
        assert_eq!(CliError::Csv(CsvError::Empty).exit_code(), ExitCode::from(2));
    }
}
