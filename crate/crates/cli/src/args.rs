use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fibbench_core::{AlgorithmId, FibError, GroupId, PowMethod, DEFAULT_MAX_DEPTH};

/// Compute, benchmark and cross-check twelve Fibonacci algorithms.
///
/// Exit codes: 0 success, 1 I/O error, 2 bad arguments, unknown algorithm
/// or malformed CSV, 3 an algorithm failed (recursion depth or float
/// overflow), 4 algorithms disagreed in `compute --all`.
#[derive(Debug, Parser)]
#[command(name = "fibbench", version, about, long_about)]
pub struct Cli {
    /// Recursion guard for the recursive algorithms.
    #[arg(long, global = true, env = "FIBBENCH_DEPTH_LIMIT", default_value_t = DEFAULT_MAX_DEPTH)]
    pub depth_limit: usize,

    /// How fib4/fib5 raise phi to the n-th power.
    #[arg(long, global = true, value_enum, default_value_t = PowArg::Native)]
    pub pow: PowArg,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute F_n with one, several or all algorithms.
    Compute(ComputeArgs),
    /// Time algorithms over a range of n and write a CSV.
    Bench(BenchArgs),
    /// Find where an algorithm first disagrees with the reference values.
    Scan(ScanArgs),
    /// Render runtime and CV line charts from a bench CSV.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    /// Algorithm id (fib1..fib12), comma-separated list, or `all`.
    #[arg(long, short = 'a', required_unless_present = "all", conflicts_with = "all")]
    pub algo: Option<String>,

    /// Run every algorithm and print an agreement table.
    #[arg(long)]
    pub all: bool,

    /// Index; negative values give negafibonacci numbers.
    #[arg(short = 'n', long = "n", allow_negative_numbers = true)]
    pub n: i64,

    /// Allow fib1 above its safe ceiling (n > 40).
    #[arg(long)]
    pub force: bool,

    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Experiment group: g1 (n<=30, all), g2 (n<=70, no fib1), g3 (n<=900,
    /// exact only), g4 (n<=10000, fastest iterative).
    #[arg(long, short = 'g', conflicts_with = "algo")]
    pub group: Option<GroupId>,

    /// Algorithm id, comma-separated list, or `all` (explicit mode).
    #[arg(long, short = 'a', required_unless_present = "group")]
    pub algo: Option<String>,

    /// Single n for explicit mode.
    #[arg(short = 'n', long = "n", conflicts_with_all = ["n_min", "n_max", "group"])]
    pub n: Option<u64>,

    /// Range start for explicit mode.
    #[arg(long, default_value_t = 0)]
    pub n_min: u64,

    /// Range end for explicit mode.
    #[arg(long)]
    pub n_max: Option<u64>,

    /// Repetitions per (algorithm, n) [default: 200, or 10000 with --full].
    #[arg(long)]
    pub reps: Option<usize>,

    /// Stride through the n range [default: the smallest keeping a group at
    /// or under 2000 records, or 1 with --full].
    #[arg(long)]
    pub n_step: Option<u64>,

    /// Full protocol: 10000 repetitions at every n.
    #[arg(long)]
    pub full: bool,

    /// Allow fib1 above n = 40.
    #[arg(long)]
    pub force: bool,

    /// Output file; stdout when absent.
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Algorithm id, comma-separated list, or `all`.
    #[arg(long, short = 'a')]
    pub algo: String,

    #[arg(long, default_value_t = 2000)]
    pub max_n: u64,

    /// Store the measured threshold for this process's status reporting.
    #[arg(long)]
    pub record: bool,

    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Bench CSV to plot.
    pub input: PathBuf,

    /// Directory for the SVG files [default: the input's directory].
    #[arg(long)]
    pub out_dir: Option<PathBuf>,

    /// File name prefix [default: the group id in the CSV, else the input
    /// file stem].
    #[arg(long)]
    pub prefix: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PowArg {
    Native,
    RepeatedSquaring,
}

impl From<PowArg> for PowMethod {
    fn from(p: PowArg) -> Self {
        match p {
            PowArg::Native => PowMethod::Native,
            PowArg::RepeatedSquaring => PowMethod::RepeatedSquaring,
        }
    }
}

/// `fib3`, `fib3,fib9` or `all`.
pub fn parse_selector(selector: &str) -> Result<Vec<AlgorithmId>, FibError> {
    if selector.trim().eq_ignore_ascii_case("all") {
        return Ok(AlgorithmId::ALL.to_vec());
    }
    let mut ids = Vec::new();
    for part in selector.split(',').filter(|p| !p.trim().is_empty()) {
        let id: AlgorithmId = part.parse()?;
        if !ids.contains(&id) {
            ids.push(id);
        }
    }
    if ids.is_empty() {
        return Err(FibError::UnknownAlgorithm(selector.to_string()));
    }
    Ok(ids)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn clap_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn selectors() {
        assert_eq!(parse_selector("all").unwrap().len(), 12);
        assert_eq!(
            parse_selector("fib3, fib9,fib3").unwrap(),
            [AlgorithmId::Fib3, AlgorithmId::Fib9]
        );
        assert!(parse_selector("fib3,fib99").is_err());
        assert!(parse_selector(",").is_err());
    }

    #[test]
    fn negative_n_parses() {
        let cli = Cli::try_parse_from(["fibbench", "compute", "--algo", "fib3", "-n", "-4"]).unwrap();
        match cli.command {
            Command::Compute(args) => assert_eq!(args.n, -4),
            other => panic!("{other:?}"),
        }
    }
}
