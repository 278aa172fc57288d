//! Stable text formats for every report type.
//!
//! CSV files have a fixed header row, comma separators, and floats printed
//! with 17 significant digits (`{:.16e}`), so identical inputs always yield
//! byte-identical files. JSON serialization goes through serde.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::metrics::TrajectoryReport;
use crate::optimize::RobustnessScan;
use crate::reference::FeasibilityResult;
use crate::spectral::{group_velocity, Dispersion, SpectrumReport};
use crate::walk::{component_distributions, position_distribution, CoinSequence, WalkerState};

/// Render a float with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Columns: `t,entropy,max_entropy,variance,entanglement,amplitude_overlap,probability_overlap,survival_probability`.
pub fn trajectory_report_csv(report: &TrajectoryReport) -> String {
    let mut out = String::from(
        "t,entropy,max_entropy,variance,entanglement,amplitude_overlap,probability_overlap,survival_probability\n",
    );
    for r in &report.records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.t,
            fmt_float(r.entropy),
            fmt_float(r.max_entropy),
            fmt_float(r.variance),
            fmt_float(r.entanglement),
            fmt_float(r.amplitude_overlap),
            fmt_float(r.probability_overlap),
            fmt_float(r.survival_probability),
        )
        .expect("string write");
    }
    out
}

/// Long-format per-step distributions.
/// Columns: `t,x,p,p_left,p_right`.
pub fn distributions_csv(states: &[WalkerState]) -> String {
    let mut out = String::from("t,x,p,p_left,p_right\n");
    for (t, state) in states.iter().enumerate() {
        let p = position_distribution(state);
        let (p_l, p_r) = component_distributions(state);
        for idx in 0..p.len() {
            writeln!(
                out,
                "{},{},{},{},{}",
                t,
                state.x_of(idx),
                fmt_float(p[idx]),
                fmt_float(p_l[idx]),
                fmt_float(p_r[idx]),
            )
            .expect("string write");
        }
    }
    out
}

/// Columns: `t,theta` for steps `1..=T`.
pub fn sequence_csv(seq: &CoinSequence) -> String {
    let mut out = String::from("t,theta\n");
    for (i, p) in seq.iter().enumerate() {
        writeln!(out, "{},{}", i + 1, fmt_float(p.theta)).expect("string write");
    }
    out
}

/// Parse a `t,theta` CSV produced by [`sequence_csv`] (or hand-written in
/// the same shape). Rows must be consecutive from `t = 1`.
pub fn parse_sequence_csv(text: &str) -> Result<Vec<f64>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty sequence file".into()))?;
    if header.trim() != "t,theta" {
        return Err(Error::Parse(format!(
            "expected header 't,theta', got '{header}'"
        )));
    }
    let mut thetas = Vec::new();
    for (row, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let t: usize = fields
            .next()
            .and_then(|f| f.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad step index on row {}", row + 2)))?;
        let theta: f64 = fields
            .next()
            .and_then(|f| f.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad theta on row {}", row + 2)))?;
        if t != thetas.len() + 1 {
            return Err(Error::Parse(format!(
                "expected step {}, found {t}",
                thetas.len() + 1
            )));
        }
        thetas.push(theta);
    }
    if thetas.is_empty() {
        return Err(Error::Parse("sequence file has no rows".into()));
    }
    Ok(thetas)
}

/// Columns: `quasi_energy`, sorted ascending, one eigenvalue per row.
pub fn spectrum_csv(report: &SpectrumReport) -> String {
    let mut out = String::from("quasi_energy\n");
    for &e in &report.quasi_energies {
        writeln!(out, "{}", fmt_float(e)).expect("string write");
    }
    out
}

/// Columns: `bin_center,count`.
pub fn dos_csv(report: &SpectrumReport) -> String {
    let mut out = String::from("bin_center,count\n");
    for (center, count) in report
        .dos
        .bin_centers()
        .iter()
        .zip(&report.dos.counts)
    {
        writeln!(out, "{},{}", fmt_float(*center), count).expect("string write");
    }
    out
}

/// Columns: `k,eps_lower,eps_upper,v_lower,v_upper`.
pub fn dispersion_csv(dispersion: &Dispersion) -> String {
    let (v_lo, v_hi) = group_velocity(dispersion);
    let mut out = String::from("k,eps_lower,eps_upper,v_lower,v_upper\n");
    for i in 0..dispersion.momenta.len() {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_float(dispersion.momenta[i]),
            fmt_float(dispersion.band_lower[i]),
            fmt_float(dispersion.band_upper[i]),
            fmt_float(v_lo[i]),
            fmt_float(v_hi[i]),
        )
        .expect("string write");
    }
    out
}

/// Columns: `t,gap` (empty gap field when no positive eigenvalue exists).
pub fn gap_evolution_csv(gaps: &[(usize, Option<f64>)]) -> String {
    let mut out = String::from("t,gap\n");
    for &(t, gap) in gaps {
        match gap {
            Some(g) => writeln!(out, "{},{}", t, fmt_float(g)),
            None => writeln!(out, "{t},"),
        }
        .expect("string write");
    }
    out
}

/// Columns: `amplitude,mean_ratio`.
pub fn robustness_csv(scan: &RobustnessScan) -> String {
    let mut out = String::from("amplitude,mean_ratio\n");
    for (a, m) in scan.noise_amplitudes.iter().zip(&scan.mean_ratios) {
        writeln!(out, "{},{}", fmt_float(*a), fmt_float(*m)).expect("string write");
    }
    out
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    s
}

/// Convenience JSON form of a feasibility scan.
pub fn feasibility_json(result: &FeasibilityResult) -> String {
    to_json(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::TrajectoryReport;
    use crate::walk::{evolve, CoinSequence, WalkerState};

    #[test]
    fn float_format_has_17_significant_digits() {
        assert_eq!(fmt_float(0.5), "5.0000000000000000e-1");
        assert_eq!(fmt_float(1.0 / 3.0), "3.3333333333333331e-1");
    }

    #[test]
    fn sequence_csv_round_trips() {
        let seq = CoinSequence::theta_only(&[0.1, 0.6154797086703873, 0.5]).unwrap();
        let text = sequence_csv(&seq);
        let parsed = parse_sequence_csv(&text).unwrap();
        assert_eq!(parsed, seq.thetas());
    }

    #[test]
    fn sequence_csv_rejects_malformed_input() {
        assert!(parse_sequence_csv("").is_err());
        assert!(parse_sequence_csv("a,b\n1,0.5\n").is_err());
        assert!(parse_sequence_csv("t,theta\n2,0.5\n").is_err());
        assert!(parse_sequence_csv("t,theta\n1,abc\n").is_err());
        assert!(parse_sequence_csv("t,theta\n").is_err());
    }

    #[test]
    fn report_csv_layout() {
        let s = WalkerState::symmetric_initial(5).unwrap();
        let states = evolve(&s, &CoinSequence::theta_only(&[0.3]).unwrap()).unwrap();
        let report = TrajectoryReport::from_states(&states).unwrap();
        let text = trajectory_report_csv(&report);
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,entropy,max_entropy,variance,entanglement,amplitude_overlap,probability_overlap,survival_probability"
        );
        assert_eq!(lines.count(), 2);
    }

    #[test]
    fn distributions_csv_covers_all_sites() {
        let s = WalkerState::symmetric_initial(5).unwrap();
        let states = evolve(&s, &CoinSequence::theta_only(&[0.3, 0.9]).unwrap()).unwrap();
        let text = distributions_csv(&states);
        // header + 3 states x 5 sites
        assert_eq!(text.lines().count(), 1 + 15);
    }
}
