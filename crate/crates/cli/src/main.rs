//! `qwalk`: batch front end for the quantum walk library.
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration or I/O
//! error, 3 numerical contract violation.

mod config;
mod error;
mod modes;
mod output;
mod parse;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use config::{ExperimentConfig, Format};
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "qwalk", version, about = "Simulate and analyse coined quantum walks on the integers")]
struct Cli {
    /// simulate, asymptotic, cavity, decay or verify. Defaults to the config file's mode.
    mode: Option<String>,
    /// JSON experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    steps: Option<usize>,
    /// rx:θ, ry:θ, rz:θ (radians) or matrix:[[re,im],...].
    #[arg(long, allow_hyphen_values = true)]
    unitary: Option<String>,
    /// plus, minus, chi:<radians>, diag:p or matrix:[[re,im],...].
    #[arg(long, allow_hyphen_values = true)]
    coin: Option<String>,
    #[arg(long)]
    margin: Option<usize>,
    #[arg(long)]
    r: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    chi: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    /// Number of φ grid points (power of two).
    #[arg(long)]
    grid: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Verification checks to run: `all` or a comma-separated list of names.
    #[arg(long)]
    suite: Option<String>,
    /// Print the effective config as JSON and exit.
    #[arg(long)]
    dump_config: bool,
}

fn load(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut c = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            ExperimentConfig::from_json(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(m) = &cli.mode {
        c.mode = m.clone();
    }
    if let Some(v) = cli.k {
        c.walk.k = v;
    }
    if let Some(v) = cli.steps {
        c.walk.steps = v;
    }
    if let Some(v) = &cli.unitary {
        c.walk.unitary = v.clone();
    }
    if let Some(v) = &cli.coin {
        c.walk.coin = v.clone();
    }
    if let Some(v) = cli.margin {
        c.walk.margin = v;
    }
    if let Some(v) = cli.r {
        c.r = v;
    }
    if let Some(v) = cli.tau {
        c.tau = v;
    }
    if let Some(v) = cli.chi {
        c.chi = v;
    }
    if let Some(v) = cli.gamma {
        c.gamma = v;
    }
    if let Some(v) = cli.grid {
        c.grid = v;
    }
    if let Some(v) = &cli.out {
        c.out = v.clone();
    }
    if let Some(v) = cli.format {
        c.format = v;
    }
    if let Some(v) = &cli.suite {
        c.suite = v.clone();
    }
    Ok(c)
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let config = load(cli)?;
    let registry = modes::Registry::default();
    let mode = registry.get(&config.mode).ok_or_else(|| {
        CliError::Config(format!("unknown mode `{}`; expected one of {}", config.mode, registry.names().join(", ")))
    })?;
    config.validate()?;
    if cli.dump_config {
        print!("{}", config.to_json());
        return Ok(true);
    }
    let report = mode.run(&config)?;
    output::write_tables(&config.out, mode.name(), config.format, &report.tables)?;
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("qwalk: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
