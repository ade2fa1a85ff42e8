mod commands;
mod config;

use clap::{Parser, Subcommand};
use commands::*;
use serde::de::DeserializeOwned;
use serde::Serialize;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config keys or input files.
    Invalid(String),
    /// A work budget ran out before the result was complete.
    Budget(String),
    /// A library self-check failed.
    Internal(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "{m}"),
            CliError::Budget(m) => write!(f, "budget exhausted: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<cdtc::Error> for CliError {
    fn from(e: cdtc::Error) -> Self {
        match e {
            cdtc::Error::Validation(_) => CliError::Internal(e.to_string()),
            cdtc::Error::Budget(m) => CliError::Budget(m),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

/// How a command finished when it did not fail outright.
#[derive(Debug, PartialEq, Eq)]
pub enum Status {
    Complete,
    Incomplete,
}

pub trait Command: Serialize + DeserializeOwned {
    const NAME: &'static str;
    /// JSON commands wrap their result in a document instead of a comment header.
    const JSON: bool = false;

    /// Fill command-dependent defaults so the echoed config is fully resolved.
    fn resolve(&mut self) -> Result<(), CliError> {
        Ok(())
    }

    fn run(&self, out: &mut String) -> Result<Status, CliError>;
}

#[derive(Parser)]
#[command(name = "cdtc", version, about = "Clifford-deformed tile code experiments")]
struct Cli {
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, env = "CDTC_THREADS")]
    threads: Option<usize>,
    /// JSON config, or an earlier output file whose embedded config is reused.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the output here instead of stdout.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a tile code and write it in the tilecode text format.
    BuildCode(BuildCode),
    /// Write a deformation map.
    Deform(Deform),
    /// Pure-Z logical basis diagnostics across sizes.
    Blo(Blo),
    /// Analytic failure-probability certificates as JSON.
    Bounds(Bounds),
    /// Code-capacity Monte Carlo over sizes and physical rates.
    Capacity(Capacity),
    /// Infinite-bias sweep over random deformation probabilities.
    PhaseSweep(PhaseSweep),
    /// Thresholds against the hashing bound across biases.
    BiasSweep(BiasSweep),
    /// Weight-reduced repetition cascade failure rates.
    Weightred(Weightred),
    /// Write a memory circuit or its detector error model.
    CircuitBuild(CircuitBuild),
    /// Sample and decode a memory circuit.
    CircuitRun(CircuitRun),
    /// Enumerate deterministic coupling schedules.
    ScheduleSearch(ScheduleSearch),
    /// Effective single-qubit bias of one extraction round.
    Effbias(Effbias),
    /// Phenomenological memory with the effective channel.
    Pheno(Pheno),
}

fn execute<C: Command>(args: C, cli: &Cli) -> Result<(String, Status), CliError> {
    let mut args = match &cli.config {
        None => args,
        Some(path) => {
            let loaded = config::load(path)?;
            if let Some(c) = loaded.command.as_deref().filter(|&c| c != C::NAME) {
                return Err(CliError::Invalid(format!("config was written by `{c}`, not `{}`", C::NAME)));
            }
            config::merge(&args, &loaded.config)?
        }
    };
    args.resolve()?;
    let mut body = String::new();
    let result = args.run(&mut body);
    let text = if C::JSON {
        let value = serde_json::from_str(&body).unwrap_or(serde_json::Value::Null);
        config::json_document(C::NAME, &args, value)
    } else {
        config::header(C::NAME, &args) + &body
    };
    match result {
        Ok(status) => Ok((text, status)),
        Err(e) if C::JSON || body.is_empty() => Err(e),
        Err(e) => {
            // partial tables are still worth keeping
            emit(cli, &text).ok();
            Err(e)
        }
    }
}

fn emit(cli: &Cli, text: &str) -> std::io::Result<()> {
    match &cli.out {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 || rayon::ThreadPoolBuilder::new().num_threads(t).build_global().is_err() {
            eprintln!("cdtc: invalid thread count {t}");
            return ExitCode::from(1);
        }
    }
    let result = match &cli.cmd {
        Cmd::BuildCode(a) => execute(a.clone(), &cli),
        Cmd::Deform(a) => execute(a.clone(), &cli),
        Cmd::Blo(a) => execute(a.clone(), &cli),
        Cmd::Bounds(a) => execute(a.clone(), &cli),
        Cmd::Capacity(a) => execute(a.clone(), &cli),
        Cmd::PhaseSweep(a) => execute(a.clone(), &cli),
        Cmd::BiasSweep(a) => execute(a.clone(), &cli),
        Cmd::Weightred(a) => execute(a.clone(), &cli),
        Cmd::CircuitBuild(a) => execute(a.clone(), &cli),
        Cmd::CircuitRun(a) => execute(a.clone(), &cli),
        Cmd::ScheduleSearch(a) => execute(a.clone(), &cli),
        Cmd::Effbias(a) => execute(a.clone(), &cli),
        Cmd::Pheno(a) => execute(a.clone(), &cli),
    };
    match result {
        Ok((text, status)) => {
            if let Err(e) = emit(&cli, &text) {
                eprintln!("cdtc: {e}");
                return ExitCode::from(1);
            }
            match status {
                Status::Complete => ExitCode::SUCCESS,
                Status::Incomplete => {
                    eprintln!("cdtc: budget exhausted, output is incomplete");
                    ExitCode::from(2)
                }
            }
        }
        Err(e) => {
            eprintln!("cdtc: {e}");
            ExitCode::from(match e {
                CliError::Invalid(_) => 1,
                CliError::Budget(_) => 2,
                CliError::Internal(_) => 3,
            })
        }
    }
}
