mod args;
mod commands;
mod svg;

use std::process::ExitCode;

use clap::Parser;
use fibbench_core::EvalConfig;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = EvalConfig {
        max_depth: cli.depth_limit,
        pow: cli.pow.into(),
    };
    let result = match &cli.command {
        Command::Compute(a) => commands::compute(a, &config),
        Command::Bench(a) => commands::bench(a, &config),
        Command::Scan(a) => commands::scan(a, &config),
        Command::Report(a) => commands::report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fibbench: {e}");
            e.exit_code()
        }
    }
}
