//! Closed-form ground truth for short walks: the exact uniform-spreading
//! coin angles, symbolic position distributions for `t <= 4`, uniformity
//! residuals, and the grid-scan proof that no four-step sequence spreads
//! uniformly. Used as oracles by the test suites and the `feasibility`
//! command.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6};

use crate::error::Result;
use crate::walk::{self, coin_matrix, CoinParams, CoinSequence, WalkerState};

/// Exact second-step angle for uniform spreading: `arctan(1/sqrt(2))`.
pub fn theta2_exact() -> f64 {
    (1.0 / 2.0f64.sqrt()).atan()
}

/// Exact third-step angle for uniform spreading: `pi/6`.
pub fn theta3_exact() -> f64 {
    FRAC_PI_6
}

/// Both closed-form angles `(theta_2, theta_3)`.
pub fn closed_form_thetas() -> (f64, f64) {
    (theta2_exact(), theta3_exact())
}

/// Symbolic position distribution after `t` steps (`1 <= t <= 4`) as
/// `(x, probability)` pairs over the occupied sites, with every coin before
/// step `t` at its uniform-spreading optimum and step `t` using `theta_t`.
///
/// `t = 1` does not depend on the angle at all.
pub fn uniform_prefix_distribution(t: usize, theta_t: f64) -> Vec<(i64, f64)> {
    let (s, c) = theta_t.sin_cos();
    let (c2, s2) = (c * c, s * s);
    match t {
        1 => vec![(-1, 0.5), (1, 0.5)],
        2 => vec![(-2, c2 / 2.0), (0, s2), (2, c2 / 2.0)],
        3 => {
            let edge = c2 / 3.0;
            let inner = 0.5 - c2 / 3.0;
            vec![(-3, edge), (-1, inner), (1, inner), (3, edge)]
        }
        4 => {
            let edge = c2 / 4.0;
            let cross = 2.0f64.sqrt() * c * s;
            let mid = 1.0 / 3.0 - c2 / 6.0 + cross / 12.0;
            let center = 1.0 / 3.0 - c2 / 6.0 - cross / 6.0;
            vec![(-4, edge), (-2, mid), (0, center), (2, mid), (4, edge)]
        }
        _ => panic!("closed forms cover t in 1..=4, got {t}"),
    }
}

/// Deviation of the step-`t` distribution from uniform over the `t + 1`
/// occupied parity sites: `max_x |P_x - 1/(t+1)|`.
///
/// `prefix` lists the theta values of steps `1..=len`; at least `t` are used.
pub fn uniformity_residual(prefix: &[f64], t: usize) -> Result<f64> {
    assert!(prefix.len() >= t, "prefix shorter than requested step");
    assert!(t >= 1);
    let seq = CoinSequence::theta_only(&prefix[..t])?;
    let state = WalkerState::symmetric_initial(walk::default_sites(t))?;
    let states = walk::evolve_boundary_free(&state, &seq)?;
    Ok(residual_of_state(states.last().expect("nonempty"), t))
}

fn residual_of_state(state: &WalkerState, t: usize) -> f64 {
    let p = walk::position_distribution(state);
    let target = 1.0 / (t + 1) as f64;
    let mut worst: f64 = 0.0;
    let mut x = -(t as i64);
    while x <= t as i64 {
        let dev = (p[state.index_of_x(x)] - target).abs();
        worst = worst.max(dev);
        x += 2;
    }
    worst
}

/// Outcome of a uniform-spreading feasibility scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeasibilityResult {
    pub steps: usize,
    /// Smallest max-deviation from uniform found anywhere on the grid,
    /// taken over every step `t = 2..=steps` simultaneously.
    pub residual: f64,
    /// Theta values attaining the minimum (`theta_2..theta_steps`;
    /// `theta_1` is immaterial and fixed to `pi/4`).
    pub arg_min: Vec<f64>,
    /// Grid points per angle.
    pub grid_resolution: usize,
}

/// Scan `(theta_2, ..., theta_T)` on a uniform `[0, pi/2]` grid and return
/// the smallest simultaneous uniformity residual. Supports `T in 2..=4`.
///
/// For `T <= 3` the residual approaches zero with the grid spacing; for
/// `T = 4` it stays above a strictly positive floor at any resolution.
pub fn verify_uniform_feasibility(steps: usize, grid_resolution: usize) -> FeasibilityResult {
    assert!(
        (2..=4).contains(&steps),
        "feasibility scan covers 2..=4 steps, got {steps}"
    );
    assert!(grid_resolution >= 2, "need at least two grid points");
    let res = grid_resolution;
    let grid: Vec<f64> = (0..res)
        .map(|i| FRAC_PI_2 * i as f64 / (res - 1) as f64)
        .collect();

    let n = walk::default_sites(steps);
    let initial = WalkerState::symmetric_initial(n).expect("valid ring");
    let first = walk::step(&initial, &CoinParams::theta_only(FRAC_PI_4).expect("valid angle"))
        .expect("valid step");
    let coins: Vec<_> = grid
        .iter()
        .map(|&t| {
            coin_matrix(&CoinParams::theta_only(t).expect("grid angle in range"))
                .expect("valid coin")
        })
        .collect();

    // (residual, flat grid index, thetas) per outer slice, reduced
    // deterministically afterwards.
    let best = (0..res)
        .into_par_iter()
        .map(|i2| {
            let mut buf2 = vec![Complex64::ZERO; 2 * n];
            let mut buf3 = vec![Complex64::ZERO; 2 * n];
            let mut buf4 = vec![Complex64::ZERO; 2 * n];
            let mut best = (f64::INFINITY, usize::MAX, Vec::new());
            walk::step_into(n, first.amplitudes(), &coins[i2], &mut buf2);
            let r2 = residual_of_buffer(&buf2, n, 2);
            if steps == 2 {
                return (r2, i2, vec![grid[i2]]);
            }
            for i3 in 0..res {
                walk::step_into(n, &buf2, &coins[i3], &mut buf3);
                let r3 = residual_of_buffer(&buf3, n, 3).max(r2);
                if steps == 3 {
                    let idx = i2 * res + i3;
                    if (r3, idx) < (best.0, best.1) {
                        best = (r3, idx, vec![grid[i2], grid[i3]]);
                    }
                    continue;
                }
                if r3 >= best.0 {
                    continue; // the max over steps can only grow past r3
                }
                for i4 in 0..res {
                    walk::step_into(n, &buf3, &coins[i4], &mut buf4);
                    let r4 = residual_of_buffer(&buf4, n, 4).max(r3);
                    let idx = (i2 * res + i3) * res + i4;
                    if (r4, idx) < (best.0, best.1) {
                        best = (r4, idx, vec![grid[i2], grid[i3], grid[i4]]);
                    }
                }
            }
            best
        })
        .reduce(
            || (f64::INFINITY, usize::MAX, Vec::new()),
            |a, b| {
                if (b.0, b.1) < (a.0, a.1) {
                    b
                } else {
                    a
                }
            },
        );

    FeasibilityResult {
        steps,
        residual: best.0,
        arg_min: best.2,
        grid_resolution: res,
    }
}

/// The four-step infeasibility scan over `(theta_2, theta_3, theta_4)`.
pub fn verify_t4_incompatibility(grid_resolution: usize) -> FeasibilityResult {
    verify_uniform_feasibility(4, grid_resolution)
}

fn residual_of_buffer(amps: &[Complex64], n: usize, t: usize) -> f64 {
    let origin = (n - 1) / 2;
    let target = 1.0 / (t + 1) as f64;
    let mut worst: f64 = 0.0;
    let mut x = -(t as i64);
    while x <= t as i64 {
        let p = (x + origin as i64).rem_euclid(n as i64) as usize;
        let prob = amps[p].norm_sqr() + amps[n + p].norm_sqr();
        worst = worst.max((prob - target).abs());
        x += 2;
    }
    worst
}

/// Long-time estimate of the optimal coin angle:
/// `theta_t = (1/2) arcsin(min(1, scale / t))`, clamping the argument for
/// small `t` where the estimate is undefined.
pub fn long_time_theta_scaled(t: usize, scale: f64) -> f64 {
    assert!(t >= 1);
    0.5 * (scale / t as f64).min(1.0).asin()
}

/// [`long_time_theta_scaled`] with the default scale of 8.
pub fn long_time_theta(t: usize) -> f64 {
    long_time_theta_scaled(t, 8.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    #[test]
    fn closed_form_values() {
        let (t2, t3) = closed_form_thetas();
        assert!((t2 - 0.6154797086703873).abs() < 1e-15);
        assert!((t3 - 0.5235987755982988).abs() < 1e-15);
    }

    #[test]
    fn closed_form_sequence_is_uniform_when_simulated() {
        let (t2, t3) = closed_form_thetas();
        let prefix = [FRAC_PI_4, t2, t3];
        for t in 1..=3 {
            let r = uniformity_residual(&prefix, t).unwrap();
            assert!(r < 1e-12, "t={t}, residual={r:.3e}");
        }
    }

    #[test]
    fn first_step_residual_vanishes_for_any_theta() {
        for theta in [0.0, 0.77, 1.2, FRAC_PI_2] {
            assert!(uniformity_residual(&[theta], 1).unwrap() < 1e-15);
        }
    }

    #[test]
    fn second_step_residual_vanishes_only_at_optimum() {
        let (t2, _) = closed_form_thetas();
        assert!(uniformity_residual(&[0.1, t2], 2).unwrap() < 1e-15);
        assert!(uniformity_residual(&[0.1, t2 + 0.2], 2).unwrap() > 1e-2);
    }

    #[test]
    fn symbolic_distributions_are_normalized() {
        for t in 1..=4 {
            for k in 0..=10 {
                let theta = FRAC_PI_2 * k as f64 / 10.0;
                let total: f64 = uniform_prefix_distribution(t, theta)
                    .iter()
                    .map(|(_, p)| p)
                    .sum();
                assert!((total - 1.0).abs() < 1e-14, "t={t} theta={theta}");
            }
        }
    }

    #[test]
    fn fourth_step_edges_match_quarter_cosine_sq() {
        let dist = uniform_prefix_distribution(4, 0.9);
        let edge = dist.iter().find(|(x, _)| *x == 4).unwrap().1;
        assert!((edge - 0.25 * 0.9f64.cos().powi(2)).abs() < 1e-15);
    }

    #[test]
    fn long_time_theta_values() {
        assert!((long_time_theta(8) - FRAC_PI_4).abs() < 1e-15);
        assert!((long_time_theta(16) - PI / 12.0).abs() < 1e-15);
        for t in 1..8 {
            assert!((long_time_theta(t) - FRAC_PI_4).abs() < 1e-15, "t={t}");
        }
        // ~ 4/t decay for large t
        let t = 4000;
        assert!((long_time_theta(t) - 4.0 / t as f64).abs() < 1e-6);
    }

    #[test]
    fn coarse_t4_scan_has_positive_floor() {
        let result = verify_uniform_feasibility(4, 40);
        assert!(result.residual > 1e-3, "residual={}", result.residual);
        assert_eq!(result.arg_min.len(), 3);
    }

    #[test]
    fn coarse_t3_scan_floor_shrinks_with_resolution() {
        let coarse = verify_uniform_feasibility(3, 30);
        let fine = verify_uniform_feasibility(3, 120);
        assert!(fine.residual < coarse.residual);
        assert!(fine.residual < 2e-2, "residual={}", fine.residual);
    }
}
