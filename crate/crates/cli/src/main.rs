mod args;
mod commands;
mod config;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::{execute, Status};
use config::RunConfig;
use error::{CliError, Result};

fn run(cli: Cli) -> Result<Status> {
    let cfg = match cli.command {
        Command::Rerun(ref r) => {
            let mut cfg = RunConfig::from_output(&r.from)?;
            if let Command::Rerun(_) = cfg.command {
                return Err(CliError::Usage("rerun cannot replay a rerun".into()));
            }
            if cli.global.out.is_some() {
                cfg.out = cli.global.out.clone();
            }
            cfg
        }
        command => RunConfig::from_cli(&cli.global, command)?,
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cfg.workers {
        if w == 0 {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        pool = pool.num_threads(w);
    }
    let pool = pool.build().map_err(|e| CliError::Io(e.to_string()))?;
    let (output, status) = pool.install(|| execute(&cfg))?;
    output.write(&cfg)?;
    Ok(status)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version go to stdout with status 0, usage errors to stderr with 2
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
