mod args;
mod commands;
mod config;
mod error;
mod grid;
mod output;

use args::{Cli, Command};
use clap::Parser;
use config::FileConfig;
use error::is_usage;
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = Cli::parse();

    if let Err(e) = init_workers(&cli) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }

    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_usage(&e) { 2 } else { 1 })
        }
    }
}

fn init_workers(cli: &Cli) -> anyhow::Result<()> {
    let workers = match cli.global.workers {
        Some(w) => Some(w),
        None => match std::env::var("HAMVOL_WORKERS") {
            Ok(raw) => Some(raw.parse().map_err(|_| {
                error::usage(format!(
                    "HAMVOL_WORKERS: cannot parse `{raw}` as a thread count"
                ))
            })?),
            Err(_) => None,
        },
    };
    if let Some(workers) = workers {
        if workers == 0 {
            return Err(error::usage("worker count must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| anyhow::anyhow!("configuring the worker pool: {e}"))?;
    }
    Ok(())
}

/// Ok(true): success. Ok(false): validation failure (exit 1).
fn run(cli: Cli) -> anyhow::Result<bool> {
    let file = FileConfig::load(cli.global.config.as_deref())?;
    match cli.command {
        Command::Analytic(args) => commands::analytic::run(args, &cli.global, &file).map(|()| true),
        Command::Mc(args) => commands::mc::run(args, &cli.global, &file).map(|()| true),
        Command::Ising(args) => commands::ising::run(args, &cli.global, &file).map(|()| true),
        Command::Fit(args) => commands::fit::run(args, &cli.global, &file).map(|()| true),
        Command::Verify(args) => commands::verify::run(args, &cli.global, &file),
    }
}
