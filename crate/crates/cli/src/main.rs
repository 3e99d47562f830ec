//! Batch front end for exact tables, forward runs, perfect samples, bounds
//! and the reference checks.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::CliError;
use config::{ConfigError, RunConfig, Settings, SEED_ENV};

#[derive(Parser)]
#[command(name = "sggraph", version, about = "Spatial Gibbs random graphs: exact tables, simulation and perfect sampling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Enumerate the Gibbs distribution of a small window.
    Exact,
    /// Simulate the birth-death dynamics on a window.
    Forward,
    /// Draw exact samples of the infinite-volume measure on a window.
    Perfect,
    /// Evaluate the subcriticality constants and bounds.
    Bounds,
    /// Run the reference checks; exit code 5 if any fails.
    Validate,
    /// Normality check of the standardized degree-indicator sum.
    Clt,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Exact => "exact",
            Command::Forward => "forward",
            Command::Perfect => "perfect",
            Command::Bounds => "bounds",
            Command::Validate => "validate",
            Command::Clt => "clt",
        }
    }
}

/// Every flag may also be given in the `--config` file; flags win.
#[derive(Args)]
struct Flags {
    /// Key-value file, one `key = value` per line.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// edge, ferrari or twostar.
    #[arg(long, global = true)]
    model: Option<String>,
    #[arg(long, global = true)]
    h0: Option<String>,
    #[arg(long, global = true)]
    h1: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    beta: Option<String>,
    /// Auxiliary inverse temperature of the bounds; defaults to the midpoint of (beta*, beta).
    #[arg(long = "beta-tilde", global = true)]
    beta_tilde: Option<String>,
    /// Box `x0:x1,y0:y1` or vertex list `x,y;x,y;...`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    window: Option<String>,
    /// Sample count, or replica count for `clt`.
    #[arg(long, global = true)]
    samples: Option<String>,
    #[arg(long, global = true)]
    horizon: Option<String>,
    #[arg(long, global = true)]
    burn: Option<String>,
    /// Master seed; falls back to SGGRAPH_SEED.
    #[arg(long, global = true)]
    seed: Option<String>,
    #[arg(long = "max-rect", global = true)]
    max_rect: Option<String>,
    #[arg(long = "max-depth", global = true)]
    max_depth: Option<String>,
    /// Extra layer sampled around the `clt` window.
    #[arg(long, global = true)]
    margin: Option<String>,
    /// Largest clan diameter reported by `perfect` and `bounds`.
    #[arg(long, global = true)]
    k: Option<String>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<String>,
    /// json or text.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Comma-separated criteria for `validate`.
    #[arg(long, global = true)]
    only: Option<String>,
}

impl Flags {
    fn settings(&self) -> Result<Settings, ConfigError> {
        let mut s = match &self.config {
            Some(path) => Settings::from_file(path)?,
            None => Settings::default(),
        };
        for (key, value) in [
            ("model", &self.model),
            ("h0", &self.h0),
            ("h1", &self.h1),
            ("beta", &self.beta),
            ("beta-tilde", &self.beta_tilde),
            ("window", &self.window),
            ("samples", &self.samples),
            ("horizon", &self.horizon),
            ("burn", &self.burn),
            ("seed", &self.seed),
            ("max-rect", &self.max_rect),
            ("max-depth", &self.max_depth),
            ("margin", &self.margin),
            ("k", &self.k),
            ("out", &self.out),
            ("format", &self.format),
            ("only", &self.only),
        ] {
            s.set(key, value.as_ref());
        }
        Ok(s)
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let settings = cli.flags.settings()?;
    let config = RunConfig::resolve(cli.command.name(), &settings, std::env::var(SEED_ENV).ok())?;
    match cli.command {
        Command::Exact => commands::cmd_exact(&config),
        Command::Forward => commands::cmd_forward(&config),
        Command::Perfect => commands::cmd_perfect(&config),
        Command::Bounds => commands::cmd_bounds(&config),
        Command::Validate => commands::cmd_validate(&config),
        Command::Clt => commands::cmd_clt(&config),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sggraph: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
