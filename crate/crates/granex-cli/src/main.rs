//! Batch front door: `granex <mode> --config <path> [--out <dir>]
//! [--seed <u64>] [--dt <f>] [--steps <n>]`.
//!
//! Exit codes: 0 all checks passed, 1 some check failed, 2 invalid
//! configuration or usage, 3 runtime divergence.

mod config;
mod run;

use config::{parse_config, Mode};
use run::{run_scenario, Overrides, RunError};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const USAGE: &str = "usage: granex <fit|simulate|closure|dist> --config <path> \
[--out <dir>] [--seed <u64>] [--dt <f>] [--steps <n>]";

struct Args {
    mode: Mode,
    config: PathBuf,
    overrides: Overrides,
}

fn parse_args(argv: &[String]) -> Result<Args, String> {
    let mut iter = argv.iter();
    let mode_word = iter.next().ok_or_else(|| USAGE.to_string())?;
    let mode =
        Mode::parse(mode_word).ok_or_else(|| format!("unknown mode {mode_word:?}\n{USAGE}"))?;

    let mut config: Option<PathBuf> = None;
    let mut overrides = Overrides::default();
    while let Some(flag) = iter.next() {
        let mut value = || {
            iter.next()
                .cloned()
                .ok_or_else(|| format!("flag {flag} needs a value"))
        };
        match flag.as_str() {
            "--config" => config = Some(PathBuf::from(value()?)),
            "--out" => overrides.out = Some(PathBuf::from(value()?)),
            "--seed" => {
                overrides.seed = Some(value()?.parse().map_err(|e| format!("--seed: {e}"))?)
            }
            "--dt" => overrides.dt = Some(value()?.parse().map_err(|e| format!("--dt: {e}"))?),
            "--steps" => {
                overrides.steps = Some(value()?.parse().map_err(|e| format!("--steps: {e}"))?)
            }
            other => return Err(format!("unknown flag {other:?}\n{USAGE}")),
        }
    }
    let config = config.ok_or_else(|| format!("--config is required\n{USAGE}"))?;
    Ok(Args {
        mode,
        config,
        overrides,
    })
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let args = match parse_args(&argv) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("{msg}");
            return ExitCode::from(2);
        }
    };

    let config = match parse_config(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    if config.mode != args.mode {
        eprintln!(
            "invalid config: scenario is mode {} but {} was requested",
            config.mode.as_str(),
            args.mode.as_str()
        );
        return ExitCode::from(2);
    }

    let base = args.config.parent().unwrap_or_else(|| Path::new("."));
    match run_scenario(&config, base, &args.overrides) {
        Ok(report) => {
            for check in &report.checks {
                let verdict = if check.passed { "pass" } else { "FAIL" };
                println!(
                    "check {:<28} {} (value {:e}, threshold {:e})",
                    check.name, verdict, check.value, check.threshold
                );
            }
            for file in &report.files {
                println!("wrote {file}");
            }
            if report.checks.iter().all(|c| c.passed) {
                println!(
                    "ok ({} checks, {:.3}s)",
                    report.checks.len(),
                    report.duration_seconds
                );
                ExitCode::SUCCESS
            } else {
                println!("FAILED");
                ExitCode::from(1)
            }
        }
        Err(RunError::Config(e)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(RunError::Divergence(msg)) => {
            eprintln!("runtime divergence: {msg}");
            ExitCode::from(3)
        }
        Err(RunError::Runtime(msg)) => {
            eprintln!("run failed: {msg}");
            ExitCode::from(1)
        }
    }
}
