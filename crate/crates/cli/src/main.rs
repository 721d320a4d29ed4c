//! `tailforge`: runs entropy-method checks, perturbation reports, Monte
//! Carlo tail estimates and the Marchenko-Pastur comparison.
//!
//! Exit status: 0 when every check passed, 1 when a check failed, 2 on
//! invalid input or any other error.

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use tailforge::montecarlo::{MpCheckConfig, SimulationConfig};
use tailforge::PerturbationChoice;

use config::{DeltaConfig, EntropyCheckConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ChoiceArg {
    /// Coordinate-wise infimum (right tail).
    Maurer,
    /// Coordinate-wise supremum (left tail).
    Left,
}

impl From<ChoiceArg> for PerturbationChoice {
    fn from(c: ChoiceArg) -> Self {
        match c {
            ChoiceArg::Maurer => PerturbationChoice::MaurerInf,
            ChoiceArg::Left => PerturbationChoice::LeftSup,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "tailforge",
    version,
    about = "Entropy-method concentration checks and eigenvalue tail reports"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML config file (JSON if the extension is .json).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, env = "TAILFORGE_WORKERS", default_value_t = 0)]
    workers: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tensorization, duality, log-Sobolev and moment generating function checks.
    EntropyCheck {
        /// FunctionTable JSON file holding a positive G.
        #[arg(long, conflicts_with = "random")]
        input: Option<PathBuf>,
        /// Check this many random positive tables.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long)]
        max_coords: Option<usize>,
        #[arg(long)]
        max_points: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Perturbation report and tail-bound curve for a table Z.
    Delta {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum)]
        choice: Option<ChoiceArg>,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo eigenvalue tail estimate against the theoretical bounds.
    Simulate {
        #[command(flatten)]
        common: Common,
    },
    /// Pooled covariance spectrum against the Marchenko-Pastur law.
    MpCheck {
        #[command(flatten)]
        common: Common,
    },
    /// Print the default config of a command.
    PrintConfig {
        #[arg(value_enum)]
        command: ConfigKind,
        /// Print JSON instead of TOML.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConfigKind {
    EntropyCheck,
    Delta,
    Simulate,
    MpCheck,
}

fn load_or_default<T: serde::de::DeserializeOwned + Default>(path: &Option<PathBuf>) -> Result<T> {
    match path {
        Some(p) => config::load(p),
        None => Ok(T::default()),
    }
}

fn emit(out: &Option<PathBuf>, body: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, body).with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            if !body.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}

fn print_config(kind: ConfigKind, json: bool) -> Result<String> {
    fn render<T: serde::Serialize>(value: &T, json: bool) -> Result<String> {
        Ok(if json {
            serde_json::to_string_pretty(value)?
        } else {
            toml::to_string(value)?
        })
    }
    match kind {
        ConfigKind::EntropyCheck => render(&EntropyCheckConfig::default(), json),
        ConfigKind::Delta => render(&DeltaConfig::default(), json),
        ConfigKind::Simulate => render(&SimulationConfig::default(), json),
        ConfigKind::MpCheck => render(&MpCheckConfig::default(), json),
    }
}

fn run(cli: Cli) -> Result<bool> {
    let (outcome, common) = match cli.command {
        Command::PrintConfig { command, json } => {
            emit(&None, &print_config(command, json)?)?;
            return Ok(true);
        }
        Command::EntropyCheck {
            input,
            random,
            max_coords,
            max_points,
            common,
        } => {
            let mut cfg: EntropyCheckConfig = load_or_default(&common.config)?;
            if input.is_some() {
                cfg.input = input;
                cfg.random = None;
            }
            if random.is_some() {
                cfg.random = random;
                cfg.input = None;
            }
            cfg.max_coords = max_coords.unwrap_or(cfg.max_coords);
            cfg.max_points = max_points.unwrap_or(cfg.max_points);
            cfg.seed = common.seed.unwrap_or(cfg.seed);
            (commands::entropy_check(&cfg, common.format)?, common)
        }
        Command::Delta {
            input,
            choice,
            common,
        } => {
            let mut cfg: DeltaConfig = load_or_default(&common.config)?;
            cfg.input = input.or(cfg.input);
            if let Some(c) = choice {
                cfg.choice = c.into();
            }
            (commands::delta(&cfg, common.format)?, common)
        }
        Command::Simulate { common } => {
            let mut cfg: SimulationConfig = load_or_default(&common.config)?;
            cfg.seed = common.seed.unwrap_or(cfg.seed);
            (
                commands::simulate(&cfg, common.workers, common.format)?,
                common,
            )
        }
        Command::MpCheck { common } => {
            let mut cfg: MpCheckConfig = load_or_default(&common.config)?;
            cfg.seed = common.seed.unwrap_or(cfg.seed);
            (commands::mp(&cfg, common.workers, common.format)?, common)
        }
    };
    emit(&common.out, &outcome.body)?;
    eprintln!("{}", outcome.summary);
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
