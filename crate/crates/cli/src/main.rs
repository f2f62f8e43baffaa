mod args;
mod commands;
mod io;

use std::io::Write;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::Parser;
use serde_json::json;

use crate::args::Cli;
use crate::io::{manifest_path, write_json, CliError, CliResult};

const VERSION: &str = env!("CARGO_PKG_VERSION");

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: &Cli) -> CliResult<bool> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::config("threads", "must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Failed(e.to_string()))?;
    }
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let clock = Instant::now();
    let report = commands::run(&cli.command)?;
    let command = serde_json::to_value(&cli.command)
        .ok()
        .and_then(|v| v.as_object().and_then(|m| m.keys().next().cloned()))
        .unwrap_or_default();
    let manifest = json!({
        "tool": "fup-lab",
        "version": VERSION,
        "command": command,
        "config": cli,
        "threads": rayon::current_num_threads(),
        "seeds": report.seeds,
        "outputs": report.outputs,
        "results": report.results,
        "failures": report.failures,
        "passed": report.failures.is_empty(),
        "started_unix_s": started,
        "wall_time_s": clock.elapsed().as_secs_f64(),
    });
    write_json(&manifest_path(&report.outputs[0]), &manifest)?;
    // A closed stdout (e.g. piped into `head`) is not an error.
    let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(&report.results).unwrap_or_default());
    for f in &report.failures {
        eprintln!("assertion failed: {f}");
    }
    Ok(report.failures.is_empty())
}
