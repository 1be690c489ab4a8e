//! `lowfreq2d` command-line driver.

mod commands;
mod error;
mod output;

use clap::{Args, Parser, Subcommand};
use commands::Context;
use error::{CliError, EXIT_USAGE};
use lowfreq2d::config::ScattererConfig;
use lowfreq2d::scatterer::RadialScatterer;
use output::OutputDir;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "lowfreq2d",
    version,
    about = "Low-energy scattering computations for radial scatterers in the plane"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Io {
    /// Configuration file (`key = value` lines)
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory, created if missing
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Subcommand, Clone)]
enum Command {
    /// Zero-energy classification: resonances, eigenvalues, U_log, capacity
    Classify(Io),
    /// Logarithmic capacity and the pole shift a
    Capacity(Io),
    /// Sample <R(λ)f, g> near zero and fit the low-energy expansion
    Expand(Io),
    /// Scattering phase against its low-energy asymptotic
    Phase(Io),
    /// Poles of one partial wave
    Resonance(Io),
    /// Poles and scattering phase along V0 + εV1
    Perturb(Io),
    /// Wave evolution at one point and its decay law
    Wave(Io),
    /// Resolvent identity residuals
    Verify(Io),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Classify(_) => "classify",
            Command::Capacity(_) => "capacity",
            Command::Expand(_) => "expand",
            Command::Phase(_) => "phase",
            Command::Resonance(_) => "resonance",
            Command::Perturb(_) => "perturb",
            Command::Wave(_) => "wave",
            Command::Verify(_) => "verify",
        }
    }

    fn io(&self) -> &Io {
        match self {
            Command::Classify(io)
            | Command::Capacity(io)
            | Command::Expand(io)
            | Command::Phase(io)
            | Command::Resonance(io)
            | Command::Perturb(io)
            | Command::Wave(io)
            | Command::Verify(io) => io,
        }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct RunManifest<'a> {
    command: &'static str,
    config_path: String,
    config_hash: String,
    tool_version: &'static str,
    parallel: bool,
    parameters: &'a ScattererConfig,
    scatterer: &'a RadialScatterer,
    status: &'static str,
    wall_time_seconds: f64,
    files: &'a [String],
}

#[cfg(not(feature = "parallel"))]
fn configure_threads() -> Result<(), CliError> {
    Ok(())
}

#[cfg(feature = "parallel")]
fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("LOWFREQ2D_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::validation(format!(
            "LOWFREQ2D_THREADS must be a positive integer, got `{v}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::validation(format!("thread pool: {e}")))
}

fn hex_sha256(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn run(cmd: &Command) -> Result<(), CliError> {
    let start = Instant::now();
    configure_threads()?;
    let io = cmd.io();
    let text = std::fs::read_to_string(&io.config)
        .map_err(|e| CliError::io(&format!("reading {}", io.config.display()), e))?;
    let cfg = ScattererConfig::parse(&text)?;
    let scatterer = cfg.resolved_scatterer()?;
    let ctx = Context {
        cfg: &cfg,
        scatterer,
    };
    let mut out = OutputDir::create(io.out.clone())?;
    let result = match cmd {
        Command::Classify(_) => commands::classify_cmd(&ctx, &mut out),
        Command::Capacity(_) => commands::capacity_cmd(&ctx, &mut out),
        Command::Expand(_) => commands::expand_cmd(&ctx, &mut out),
        Command::Phase(_) => commands::phase_cmd(&ctx, &mut out),
        Command::Resonance(_) => commands::resonance_cmd(&ctx, &mut out),
        Command::Perturb(_) => commands::perturb_cmd(&ctx, &mut out),
        Command::Wave(_) => commands::wave_cmd(&ctx, &mut out),
        Command::Verify(_) => commands::verify_cmd(&ctx, &mut out),
    };
    let files = out.files().to_vec();
    let manifest = RunManifest {
        command: cmd.name(),
        config_path: io.config.display().to_string(),
        config_hash: hex_sha256(text.as_bytes()),
        tool_version: env!("CARGO_PKG_VERSION"),
        parallel: lowfreq2d::exec::is_parallel(),
        parameters: &cfg,
        scatterer: &ctx.scatterer,
        status: if result.is_ok() { "ok" } else { "failed" },
        wall_time_seconds: start.elapsed().as_secs_f64(),
        files: &files,
    };
    out.manifest(&manifest)?;
    result
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE as u8),
            };
        }
    };
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", serde_json::to_string(&e).expect("error serialises"));
            ExitCode::from(e.code as u8)
        }
    }
}
