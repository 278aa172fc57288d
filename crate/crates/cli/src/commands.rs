//! Implementations of the subcommands.

use anyhow::{bail, Context, Result};
use std::path::{Path, PathBuf};

use qwalk::io;
use qwalk::metrics::TrajectoryReport;
use qwalk::optimize::{
    self, Mode, OptimizationRun, ParameterSet, SearchOptions,
};
use qwalk::reference;
use qwalk::spectral;
use qwalk::walk::{self, CoinSequence, WalkerState};

use crate::config::{
    FeasibilityConfig, OptimizeConfig, RobustnessConfig, SimulateConfig, SpectrumConfig,
};

/// Resolved coin source.
enum ThetaSource {
    Constant(f64),
    List(Vec<f64>),
    File(PathBuf),
    Heuristic,
}

impl ThetaSource {
    fn parse(spec: &str) -> Result<Self> {
        if spec == "heuristic" {
            return Ok(Self::Heuristic);
        }
        if let Some(value) = spec.strip_prefix("const:") {
            let theta: f64 = value
                .parse()
                .with_context(|| format!("bad constant theta '{value}'"))?;
            return Ok(Self::Constant(snap_to_range(theta)));
        }
        if let Some(list) = spec.strip_prefix("list:") {
            let thetas = list
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<f64>, _>>()
                .with_context(|| format!("bad theta list '{list}'"))?;
            return Ok(Self::List(thetas));
        }
        if let Some(path) = spec.strip_prefix("file:") {
            return Ok(Self::File(PathBuf::from(path)));
        }
        bail!("theta source must be const:VALUE, list:V1,V2,..., file:PATH or heuristic, got '{spec}'")
    }

    /// Materialize the sequence, reconciling with an explicit step count.
    fn sequence(&self, steps: Option<usize>) -> Result<CoinSequence> {
        let thetas = match self {
            Self::Constant(theta) => {
                let steps = steps.context("--steps is required with const: sources")?;
                vec![*theta; steps]
            }
            Self::Heuristic => {
                let steps = steps.context("--steps is required with heuristic sources")?;
                (1..=steps).map(reference::long_time_theta).collect()
            }
            Self::List(thetas) => thetas.clone(),
            Self::File(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading sequence {}", path.display()))?;
                io::parse_sequence_csv(&text)?
            }
        };
        if let Some(steps) = steps {
            if !matches!(self, Self::Constant(_) | Self::Heuristic) && thetas.len() != steps {
                bail!(
                    "--steps {} disagrees with the {} thetas supplied",
                    steps,
                    thetas.len()
                );
            }
        }
        let thetas: Vec<f64> = thetas.into_iter().map(snap_to_range).collect();
        Ok(CoinSequence::theta_only(&thetas)?)
    }
}

/// Decimal renderings of 0 and pi/2 can land a hair outside the closed
/// interval; pull anything within 1e-9 back onto the boundary.
fn snap_to_range(theta: f64) -> f64 {
    let hi = std::f64::consts::FRAC_PI_2;
    if theta < 0.0 && theta >= -1e-9 {
        0.0
    } else if theta > hi && theta <= hi + 1e-9 {
        hi
    } else {
        theta
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn prefixed(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(suffix);
    prefix.with_file_name(name)
}

fn odd_sites(requested: Option<usize>, steps: usize) -> Result<usize> {
    let n = requested.unwrap_or_else(|| walk::default_sites(steps));
    if n < 3 || n % 2 == 0 {
        bail!("--sites must be odd and at least 3, got {n}");
    }
    Ok(n)
}

pub fn simulate(config: SimulateConfig) -> Result<()> {
    let spec = config.theta.context("--theta is required")?;
    let seq = ThetaSource::parse(&spec)?.sequence(config.steps)?;
    let steps = seq.len();
    let n_sites = odd_sites(config.sites, steps)?;
    if n_sites < walk::default_sites(steps) {
        bail!(
            "{n_sites} sites cannot hold a boundary-free {steps}-step walk; need {}",
            walk::default_sites(steps)
        );
    }
    let initial = WalkerState::symmetric_initial(n_sites)?;
    let states = walk::evolve_boundary_free(&initial, &seq)?;
    let report = TrajectoryReport::from_states(&states)?;

    let prefix = config.out_prefix.context("--out-prefix is required")?;
    write_file(&prefixed(&prefix, "_report.csv"), &io::trajectory_report_csv(&report))?;
    write_file(&prefixed(&prefix, "_report.json"), &io::to_json(&report))?;
    write_file(&prefixed(&prefix, "_distributions.csv"), &io::distributions_csv(&states))?;

    let last = &report.records[steps];
    println!(
        "simulate: steps={steps} sites={n_sites} F={:.6e} S(T)={:.6} Smax(T)={:.6} var(T)={:.4}",
        report.spread_objective(),
        last.entropy,
        last.max_entropy,
        last.variance
    );
    Ok(())
}

pub fn optimize(config: OptimizeConfig) -> Result<()> {
    let steps = config.steps.context("--steps is required")?;
    let mode = match config.mode.as_deref().unwrap_or("global") {
        "global" => Mode::Global,
        "stepwise" => Mode::Stepwise,
        "final" | "final_step" => Mode::FinalStep,
        other => bail!("--mode must be global, stepwise or final, got '{other}'"),
    };
    let parameter_set = match config.params.as_deref().unwrap_or("theta") {
        "theta" | "theta_only" => ParameterSet::ThetaOnly,
        "full" | "full_su2" => ParameterSet::FullSu2,
        other => bail!("--params must be theta or full, got '{other}'"),
    };
    let restarts = config.restarts.unwrap_or(50);
    let seed = config.seed.unwrap_or(0);
    let opts = SearchOptions::default();

    let run: OptimizationRun = match mode {
        Mode::Global => optimize::minimize_global(steps, parameter_set, restarts, seed, &opts),
        Mode::FinalStep => {
            optimize::minimize_final_step(steps, parameter_set, restarts, seed, &opts)
        }
        Mode::Stepwise => {
            if parameter_set != ParameterSet::ThetaOnly {
                bail!("stepwise mode supports only --params theta");
            }
            optimize::minimize_stepwise(steps, seed)
        }
    };

    let prefix = config.out_prefix.context("--out-prefix is required")?;
    write_file(&prefixed(&prefix, "_run.json"), &io::to_json(&run))?;
    write_file(&prefixed(&prefix, "_best.csv"), &io::sequence_csv(&run.best_sequence))?;

    println!(
        "optimize: mode={} params={} steps={} restarts={} seed={} best={:.6e} evaluations={} wall={:.2}s",
        run.mode,
        run.parameter_set,
        run.steps,
        run.restarts,
        run.seed,
        run.best_value,
        run.evaluations,
        run.wall_time_seconds
    );
    Ok(())
}

pub fn spectrum(config: SpectrumConfig) -> Result<()> {
    let spec = config.theta.context("--theta is required")?;
    let source = ThetaSource::parse(&spec)?;
    let seq = source.sequence(config.steps.or(Some(1)))?;
    let n_sites = odd_sites(config.sites, seq.len())?;
    let bins = config.bins.unwrap_or(spectral::DEFAULT_DOS_BINS);

    let report = spectral::spectrum_of_sequence(&seq, n_sites, bins)?;
    let prefix = config.out_prefix.context("--out-prefix is required")?;
    write_file(&prefixed(&prefix, "_spectrum.csv"), &io::spectrum_csv(&report))?;
    write_file(&prefixed(&prefix, "_spectrum.json"), &io::to_json(&report))?;
    write_file(&prefixed(&prefix, "_dos.csv"), &io::dos_csv(&report))?;

    if let ThetaSource::Constant(theta) = source {
        let dispersion = spectral::dispersion_constant_coin(theta, n_sites)?;
        write_file(&prefixed(&prefix, "_dispersion.csv"), &io::dispersion_csv(&dispersion))?;
    }
    if config.gap_evolution.unwrap_or(false) {
        let gaps = spectral::gap_evolution(&seq, n_sites)?;
        write_file(&prefixed(&prefix, "_gaps.csv"), &io::gap_evolution_csv(&gaps))?;
    }

    println!(
        "spectrum: sites={n_sites} eigenvalues={} gap={} max_modulus_dev={:.3e}",
        report.quasi_energies.len(),
        report
            .gap
            .map(|g| format!("{g:.6e}"))
            .unwrap_or_else(|| "none".into()),
        report.max_modulus_deviation
    );
    Ok(())
}

fn parse_amplitudes(spec: &str) -> Result<Vec<f64>> {
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            bail!("amplitude range must be start:stop:step, got '{spec}'");
        }
        let start: f64 = parts[0].parse().context("bad range start")?;
        let stop: f64 = parts[1].parse().context("bad range stop")?;
        let step: f64 = parts[2].parse().context("bad range step")?;
        if step <= 0.0 || stop < start {
            bail!("amplitude range must satisfy step > 0 and stop >= start");
        }
        let count = ((stop - start) / step).round() as usize;
        let mut values: Vec<f64> = (0..=count).map(|i| start + i as f64 * step).collect();
        values.retain(|v| *v <= stop + step * 1e-9);
        Ok(values)
    } else {
        spec.split(',')
            .map(|v| v.trim().parse::<f64>().context("bad amplitude"))
            .collect()
    }
}

pub fn robustness(config: RobustnessConfig) -> Result<()> {
    let input = config.input.context("--input is required")?;
    let text = std::fs::read_to_string(&input)
        .with_context(|| format!("reading run {}", input.display()))?;
    let run: OptimizationRun =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", input.display()))?;

    let amplitudes = parse_amplitudes(
        config
            .amplitudes
            .as_deref()
            .context("--amplitudes is required")?,
    )?;
    let samples = config.samples.unwrap_or(1000);
    let seed = config.seed.unwrap_or(0);

    let scan = optimize::robustness_scan(&run.best_sequence, &amplitudes, samples, seed);

    let prefix = config.out_prefix.context("--out-prefix is required")?;
    write_file(&prefixed(&prefix, "_robustness.csv"), &io::robustness_csv(&scan))?;
    write_file(&prefixed(&prefix, "_robustness.json"), &io::to_json(&scan))?;

    println!(
        "robustness: amplitudes={} samples={} base={:.6e} mean_ratio_last={:.4}",
        scan.noise_amplitudes.len(),
        samples,
        scan.base_value,
        scan.mean_ratios.last().copied().unwrap_or(1.0)
    );
    Ok(())
}

pub fn feasibility(config: FeasibilityConfig) -> Result<()> {
    let steps = config.steps.unwrap_or(4);
    if !(2..=4).contains(&steps) {
        bail!("--steps must be 2, 3 or 4, got {steps}");
    }
    let resolution = config.resolution.unwrap_or(200);
    if resolution < 2 {
        bail!("--resolution must be at least 2");
    }
    let result = reference::verify_uniform_feasibility(steps, resolution);
    if let Some(out) = &config.out {
        write_file(out, &io::feasibility_json(&result))?;
    }
    println!(
        "feasibility: steps={} resolution={} residual={:.6e} arg_min={:?}",
        result.steps, result.grid_resolution, result.residual, result.arg_min
    );
    Ok(())
}
