//! Command-line front end: simulate walks, optimize coin sequences, compute
//! spectra, run robustness and feasibility scans, and emit figure-ready CSV
//! and JSON files.

mod commands;
mod config;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use config::{
    FeasibilityConfig, OptimizeConfig, RobustnessConfig, SimulateConfig, SpectrumConfig,
};

#[derive(Parser)]
#[command(
    name = "qwalk",
    about = "1D discrete-time quantum walks with time-dependent coins: \
             simulation, spread optimization, spectra, robustness and \
             feasibility scans",
    version
)]
struct Cli {
    /// Cap worker threads (default: all cores). Results never depend on
    /// the thread count.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a walk and write its trajectory report and distributions.
    Simulate(ConfigArgs<SimulateConfig>),
    /// Search for a coin sequence minimizing a spread objective.
    Optimize(ConfigArgs<OptimizeConfig>),
    /// Quasi-energy spectrum, density of states, and (constant coins)
    /// dispersion with group velocities.
    Spectrum(ConfigArgs<SpectrumConfig>),
    /// Noise-robustness scan of an optimized sequence.
    Robustness(ConfigArgs<RobustnessConfig>),
    /// Grid-scan feasibility of uniform spreading for short walks.
    Feasibility(ConfigArgs<FeasibilityConfig>),
}

/// Flag set of one subcommand plus an optional JSON config file supplying
/// the same keys. Precedence: CLI flags, then config file, then defaults.
#[derive(Args)]
struct ConfigArgs<C: Args> {
    /// JSON file with the same keys as the long flags; unknown keys are
    /// rejected.
    #[arg(long)]
    config: Option<std::path::PathBuf>,

    #[command(flatten)]
    flags: C,
}

impl<C> ConfigArgs<C>
where
    C: Args + config::Merge + serde::de::DeserializeOwned,
{
    fn resolve(self) -> Result<C> {
        let mut resolved = self.flags;
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            let from_file: C = serde_json::from_str(&text)
                .with_context(|| format!("parsing config {}", path.display()))?;
            resolved.fill_from(from_file);
        }
        Ok(resolved)
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("initializing thread pool")?;
    }
    match cli.command {
        Command::Simulate(args) => commands::simulate(args.resolve()?),
        Command::Optimize(args) => commands::optimize(args.resolve()?),
        Command::Spectrum(args) => commands::spectrum(args.resolve()?),
        Command::Robustness(args) => commands::robustness(args.resolve()?),
        Command::Feasibility(args) => commands::feasibility(args.resolve()?),
    }
}
