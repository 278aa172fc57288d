//! Per-command configuration. Each struct serves both as the clap flag set
//! and as the JSON config-file schema; every field is optional so that
//! config-file values only fill flags the user did not pass.

use clap::Args;
use serde::Deserialize;
use std::path::PathBuf;

/// Fill unset fields from a lower-precedence source.
pub trait Merge {
    fn fill_from(&mut self, other: Self);
}

macro_rules! merge_fields {
    ($self:ident, $other:ident, $($field:ident),+ $(,)?) => {
        $(if $self.$field.is_none() {
            $self.$field = $other.$field;
        })+
    };
}

#[derive(Args, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    /// Coin source: `const:VALUE`, `list:V1,V2,...`, `file:PATH`
    /// (a `t,theta` CSV), or `heuristic`.
    #[arg(long)]
    pub theta: Option<String>,

    /// Number of time steps (required for `const:` and `heuristic`).
    #[arg(long)]
    pub steps: Option<usize>,

    /// Ring size override; odd, default `2 * steps + 1`.
    #[arg(long)]
    pub sites: Option<usize>,

    /// Output path prefix; writes `<prefix>_report.csv`,
    /// `<prefix>_report.json` and `<prefix>_distributions.csv`.
    #[arg(long)]
    pub out_prefix: Option<PathBuf>,
}

impl Merge for SimulateConfig {
    fn fill_from(&mut self, other: Self) {
        merge_fields!(self, other, theta, steps, sites, out_prefix);
    }
}

#[derive(Args, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct OptimizeConfig {
    /// `global`, `stepwise`, or `final`.
    #[arg(long)]
    pub mode: Option<String>,

    /// Sequence length to optimize.
    #[arg(long)]
    pub steps: Option<usize>,

    /// `theta` (default) or `full` for all three coin angles.
    #[arg(long)]
    pub params: Option<String>,

    /// Local searches per run (default 50).
    #[arg(long)]
    pub restarts: Option<usize>,

    /// Root seed; restart `i` uses stream `i` (default 0).
    #[arg(long)]
    pub seed: Option<u64>,

    /// Output path prefix; writes `<prefix>_run.json` and
    /// `<prefix>_best.csv`.
    #[arg(long)]
    pub out_prefix: Option<PathBuf>,
}

impl Merge for OptimizeConfig {
    fn fill_from(&mut self, other: Self) {
        merge_fields!(self, other, mode, steps, params, restarts, seed, out_prefix);
    }
}

#[derive(Args, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    /// Coin source, as in `simulate`.
    #[arg(long)]
    pub theta: Option<String>,

    /// Sequence length (for `const:` sources; default 1).
    #[arg(long)]
    pub steps: Option<usize>,

    /// Ring size; odd, default `2 * steps + 1`.
    #[arg(long)]
    pub sites: Option<usize>,

    /// Density-of-states bins (default 64).
    #[arg(long)]
    pub bins: Option<usize>,

    /// Also write the gap of every prefix operator to `<prefix>_gaps.csv`.
    #[arg(long)]
    pub gap_evolution: Option<bool>,

    /// Output path prefix; writes `<prefix>_spectrum.{csv,json}`,
    /// `<prefix>_dos.csv`, and for constant coins `<prefix>_dispersion.csv`.
    #[arg(long)]
    pub out_prefix: Option<PathBuf>,
}

impl Merge for SpectrumConfig {
    fn fill_from(&mut self, other: Self) {
        merge_fields!(self, other, theta, steps, sites, bins, gap_evolution, out_prefix);
    }
}

#[derive(Args, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct RobustnessConfig {
    /// Optimization run JSON (from `optimize`) supplying the sequence.
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// Noise grid: `start:stop:step` or a comma list of amplitudes.
    #[arg(long)]
    pub amplitudes: Option<String>,

    /// Perturbations per amplitude (default 1000).
    #[arg(long)]
    pub samples: Option<usize>,

    /// Root seed (default 0).
    #[arg(long)]
    pub seed: Option<u64>,

    /// Output path prefix; writes `<prefix>_robustness.{csv,json}`.
    #[arg(long)]
    pub out_prefix: Option<PathBuf>,
}

impl Merge for RobustnessConfig {
    fn fill_from(&mut self, other: Self) {
        merge_fields!(self, other, input, amplitudes, samples, seed, out_prefix);
    }
}

#[derive(Args, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct FeasibilityConfig {
    /// Walk length to test (2..=4; default 4).
    #[arg(long)]
    pub steps: Option<usize>,

    /// Grid points per angle (default 200).
    #[arg(long)]
    pub resolution: Option<usize>,

    /// Output JSON path (optional; result always prints to stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Merge for FeasibilityConfig {
    fn fill_from(&mut self, other: Self) {
        merge_fields!(self, other, steps, resolution, out);
    }
}
