//! `cnoidal`: derive, solve, verify and simulate elliptic traveling waves.

mod args;
mod commands;
mod config;
mod error;
mod format;
mod simulate;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, Common};
use commands::Outcome;
use config::RunConfig;
use error::CliError;

fn resolve(common: &Common, overrides: Vec<(&'static str, String)>) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &common.config {
        cfg.apply_file(path)?;
    }
    for (key, value) in overrides {
        cfg.set(key, &value)?;
    }
    cfg.out = common.out.clone();
    if let Some(f) = &common.format {
        cfg.format = f.parse().map_err(CliError::usage)?;
    }
    Ok(cfg)
}

fn save(cfg: &RunConfig, name: &str, text: &str) -> Result<(), CliError> {
    if let Some(dir) = &cfg.out {
        std::fs::create_dir_all(dir).map_err(CliError::io)?;
        std::fs::write(Path::new(dir).join(name), text).map_err(CliError::io)?;
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Derive(a) => {
            let cfg = resolve(&a.common, a.overrides())?;
            let out = commands::derive(&cfg, a.raw)?;
            save(&cfg, "derive.txt", &out.stdout)?;
            Ok(out)
        }
        Command::Solve(a) => {
            let cfg = resolve(&a.common, a.overrides())?;
            let out = commands::solve(&cfg, a.numeric)?;
            let ext = match cfg.format {
                format::Format::Csv => "csv",
                format::Format::Record => "txt",
            };
            save(&cfg, &format!("solve.{ext}"), &out.stdout)?;
            Ok(out)
        }
        Command::Verify(a) => {
            let cfg = resolve(&a.common, a.overrides())?;
            let out = commands::verify(&cfg)?;
            save(&cfg, "verify.txt", &out.stdout)?;
            Ok(out)
        }
        Command::Simulate(a) => simulate::simulate(&resolve(&a.common, a.overrides())?),
        Command::Sweep(a) => {
            let cfg = resolve(&a.common, a.overrides())?;
            simulate::sweep(&cfg, &a.vary, a.jobs)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.stdout.as_bytes());
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
