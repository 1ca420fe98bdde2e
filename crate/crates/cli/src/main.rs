//! `steklov`: runs the constructions, sweeps, searches and bound suites and
//! writes CSV/JSON artifacts. Exit codes: 0 ok, 1 other failure, 2 invalid
//! configuration, 3 failed verification.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use config::{DeltaArg, Overrides};
use steklov_core::Error;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Verification(String),
    Other(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Other(_) => 1,
            CliError::Config(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "invalid configuration: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
            CliError::Other(m) => write!(f, "{m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::ParameterOutOfRange { .. } => CliError::Config(e.to_string()),
            Error::Construction(_)
            | Error::SteklovViolation { .. }
            | Error::NotNormalized { .. }
            | Error::ZeroInDisk { .. }
            | Error::ZeroOnCircle { .. }
            | Error::Extraction { .. } => CliError::Verification(e.to_string()),
            other => CliError::Other(other.to_string()),
        }
    }
}

/// Where results go: files under `--out`, or stdout for the primary output.
pub struct Output {
    dir: Option<PathBuf>,
}

impl Output {
    fn new(dir: Option<PathBuf>) -> Result<Self, CliError> {
        if let Some(d) = &dir {
            std::fs::create_dir_all(d).map_err(|e| CliError::Other(format!("{}: {e}", d.display())))?;
        }
        Ok(Self { dir })
    }

    fn write(&self, name: &str, text: &str) -> Result<(), CliError> {
        if let Some(d) = &self.dir {
            let path = d.join(name);
            std::fs::write(&path, text).map_err(|e| CliError::Other(format!("{}: {e}", path.display())))?;
            log::info!("wrote {}", path.display());
        }
        Ok(())
    }

    pub fn primary(&mut self, name: &str, text: &str) -> Result<(), CliError> {
        match self.dir {
            Some(_) => self.write(name, text),
            None => commands::to_stdout(text),
        }
    }

    /// Secondary files, written only with `--out`.
    pub fn artifact(&mut self, name: &str, text: &str) -> Result<(), CliError> {
        self.write(name, text)
    }
}

#[derive(Parser)]
#[command(name = "steklov", version, about = "Steklov-class orthogonal polynomial experiments")]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the explicit polynomial, verify it, and dump the report and σ'.
    Construct {
        #[arg(long, default_value_t = 256)]
        n: usize,
        /// Steklov constant, or `auto` for the certified one.
        #[arg(long, default_value = "auto")]
        delta: DeltaArg,
    },
    /// Construction over several degrees: CSV of |φ_n(1)| and |φ_n(1)|/√n.
    Sweep {
        #[arg(long, default_value = "128,256,512", value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long, default_value = "auto")]
        delta: DeltaArg,
    },
    /// Upper bound √((n+1)/δ) against the equidistant-atom measure.
    Bounds {
        #[arg(long, default_value = "3", value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        /// Mass of each atom.
        #[arg(long, default_value_t = 1e6)]
        mass: f64,
    },
    /// Local search for measures maximizing |φ_n(1)| in S_δ.
    Search {
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 1e-2)]
        delta: f64,
        /// Maximum number of atoms.
        #[arg(long)]
        atoms: Option<usize>,
        #[arg(long, default_value_t = 200)]
        iters: usize,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
    },
    /// Growth of the polynomial entropy with n.
    Entropy {
        #[arg(long, default_value = "128,256,512,1024,2048", value_delimiter = ',')]
        n: Vec<usize>,
        /// Class parameter (default 1e-6).
        #[arg(long, default_value = "auto")]
        delta: DeltaArg,
    },
    /// Numerical bound suites for the approximants and the phase of Q_m.
    Appendix {
        #[arg(long, default_value = "64,128,256,512", value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long, default_value = "0.3,0.375,0.5,0.75", value_delimiter = ',')]
        beta: Vec<f64>,
        #[arg(long, default_value = "32,64,128,256", value_delimiter = ',')]
        m: Vec<usize>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = cli.overrides.resolve()?;
    let mut out = Output::new(cli.overrides.out.clone())?;
    match cli.command {
        Command::Construct { n, delta } => commands::construct(
            &cfg,
            &commands::ConstructArgs {
                n,
                delta: delta.value(),
            },
            &mut out,
        ),
        Command::Sweep { n, delta } => commands::sweep(
            &cfg,
            &commands::SweepArgs {
                ns: n,
                delta: delta.value(),
            },
            &mut out,
        ),
        Command::Bounds { n, delta, mass } => {
            if !(delta > 0.0 && delta <= 1.0) {
                return Err(CliError::Config(format!("delta = {delta} outside (0, 1]")));
            }
            commands::bounds(&cfg, &commands::BoundsArgs { ns: n, delta, mass }, &mut out)
        }
        Command::Search {
            n,
            delta,
            atoms,
            iters,
            restarts,
        } => commands::search(
            &cfg,
            &commands::SearchArgs {
                n,
                delta,
                atoms: atoms.unwrap_or(n),
                iters,
                restarts,
            },
            &mut out,
        ),
        Command::Entropy { n, delta } => commands::entropy(
            &cfg,
            &commands::EntropyArgs {
                ns: n,
                delta: delta.value(),
            },
            &mut out,
        ),
        Command::Appendix { n, beta, m } => {
            commands::appendix(&cfg, &commands::AppendixArgs { ns: n, betas: beta, ms: m }, &mut out)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("steklov: {e}");
            ExitCode::from(e.code())
        }
    }
}
