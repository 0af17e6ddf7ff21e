//! `phicon`: command-line front end emitting JSON reports.

mod commands;
mod config;
mod error;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;

use crate::commands::{Command, Context};
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "phicon",
    version,
    about = "Exact computations with rank-three parabolic phi-connections on the projective line with three poles"
)]
struct Cli {
    /// Run configuration in TOML or JSON (poles, nu, weight, seed, sweep_count, bound)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for randomized sweeps; overrides the configuration
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Print only the outputs object
    #[arg(long, global = true)]
    bare: bool,
    /// Append wall-clock timing to the report (makes output non-reproducible)
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

pub(crate) fn read_file(path: &PathBuf) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })
}

fn workers() -> CliResult<Option<usize>> {
    match std::env::var("PHICON_WORKERS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::BadArgument(format!("PHICON_WORKERS must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(None),
    }
}

fn run(cli: Cli) -> CliResult<bool> {
    let config = match &cli.config {
        Some(path) => Some(config::parse_config(&read_file(path)?)?),
        None => None,
    };
    let seed = cli.seed.or(config.as_ref().map(|c| c.seed)).unwrap_or(0);
    let ctx = Context { config, seed, workers: workers()? };
    let started = Instant::now();
    let outcome = commands::dispatch(&ctx, &cli.command)?;
    let elapsed = started.elapsed();

    let report = if cli.bare {
        outcome.outputs
    } else {
        let mut report = json!({
            "command": cli.command.name(),
            "inputs": {
                "config": ctx.config,
                "seed": seed,
                "args": cli.command,
            },
            "outputs": outcome.outputs,
            "passed": outcome.passed,
        });
        if cli.timing {
            report["timing_ms"] = json!(elapsed.as_millis() as u64);
        }
        report
    };
    let mut stdout = std::io::stdout().lock();
    let _ = writeln!(stdout, "{}", serde_json::to_string_pretty(&report).expect("reports serialize"));
    Ok(outcome.passed)
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", serde_json::to_string(&e.to_json()).expect("errors serialize"));
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&CliError::Usage(e.render().to_string().trim().to_string())),
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => fail(&e),
    }
}
