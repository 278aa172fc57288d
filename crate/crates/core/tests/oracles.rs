//! Independent-route checks: a momentum-space reimplementation of the walk,
//! the position-side entanglement computation, and the closed-form short-walk
//! probabilities, each compared against the main code paths.

use ndarray::Array2;
use ndarray_linalg::Eigh;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use qwalk::metrics::{entanglement_entropy, variance};
use qwalk::reference::{closed_form_thetas, uniform_prefix_distribution};
use qwalk::walk::{
    evolve_boundary_free, position_distribution, CoinSequence, WalkerState,
};

/// Momentum-space evolution of the symmetric initial state under a constant
/// theta coin: per-mode 2x2 products followed by an inverse transform. Never
/// touches `walk::step`.
fn fourier_walk_distribution(theta: f64, steps: usize, n: usize) -> Vec<f64> {
    let (sin, cos) = theta.sin_cos();
    let b = [
        [Complex64::new(cos, 0.0), Complex64::new(sin, 0.0)],
        [Complex64::new(sin, 0.0), Complex64::new(-cos, 0.0)],
    ];
    let inv_sqrt_n = 1.0 / (n as f64).sqrt();
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut modes: Vec<[Complex64; 2]> = vec![
        [
            Complex64::new(inv_sqrt2 * inv_sqrt_n, 0.0),
            Complex64::new(0.0, inv_sqrt2 * inv_sqrt_n),
        ];
        n
    ];
    for (m, mode) in modes.iter_mut().enumerate() {
        let k = 2.0 * PI * m as f64 / n as f64;
        let d_r = Complex64::from_polar(1.0, -k);
        let d_l = Complex64::from_polar(1.0, k);
        for _ in 0..steps {
            let r = b[0][0] * mode[0] + b[0][1] * mode[1];
            let l = b[1][0] * mode[0] + b[1][1] * mode[1];
            mode[0] = d_r * r;
            mode[1] = d_l * l;
        }
    }
    let origin = (n as i64 - 1) / 2;
    (0..n)
        .map(|p| {
            let x = (p as i64 - origin) as f64;
            let mut r = Complex64::ZERO;
            let mut l = Complex64::ZERO;
            for (m, mode) in modes.iter().enumerate() {
                let k = 2.0 * PI * m as f64 / n as f64;
                let phase = Complex64::from_polar(inv_sqrt_n, k * x);
                r += phase * mode[0];
                l += phase * mode[1];
            }
            r.norm_sqr() + l.norm_sqr()
        })
        .collect()
}

#[test]
fn hadamard_walk_matches_fourier_oracle() {
    let steps = 100;
    let n = 201;
    let oracle = fourier_walk_distribution(FRAC_PI_4, steps, n);
    let seq = CoinSequence::constant_theta(FRAC_PI_4, steps).unwrap();
    let initial = WalkerState::symmetric_initial(n).unwrap();
    let states = evolve_boundary_free(&initial, &seq).unwrap();
    let simulated = position_distribution(states.last().unwrap());

    let max_dev = simulated
        .iter()
        .zip(&oracle)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    assert!(max_dev < 1e-12, "max site deviation {max_dev:.3e}");

    assert!((simulated.iter().sum::<f64>() - 1.0).abs() < 1e-12);

    let var_sim = variance(&simulated);
    let var_oracle = variance(&oracle);
    assert!((var_sim - var_oracle).abs() < 1e-8);
    // frozen oracle value; the two-peaked interference profile is ballistic
    assert!(
        (var_sim - 2929.422330793971).abs() < 1e-6,
        "var={var_sim:.9}"
    );
}

#[test]
fn entanglement_agrees_between_coin_and_position_sides() {
    let thetas = [0.7, 0.2, 1.1, 0.4, FRAC_PI_4, 0.05, 0.9];
    let seq = CoinSequence::theta_only(&thetas).unwrap();
    let initial = WalkerState::symmetric_initial(2 * thetas.len() + 1).unwrap();
    let states = evolve_boundary_free(&initial, &seq).unwrap();

    for state in &states[1..] {
        let n = state.n_sites();
        // position-side reduced density matrix, diagonalized in full
        let mut rho = Array2::<Complex64>::zeros((n, n));
        for xi in 0..n {
            for xj in 0..n {
                rho[[xi, xj]] = state.r_block()[xi] * state.r_block()[xj].conj()
                    + state.l_block()[xi] * state.l_block()[xj].conj();
            }
        }
        let (eigs, _) = rho
            .eigh(ndarray_linalg::UPLO::Lower)
            .expect("hermitian decomposition");
        let position_entropy: f64 = -eigs
            .iter()
            .filter(|&&v| v > 1e-15)
            .map(|&v| v * v.ln())
            .sum::<f64>();
        let coin_entropy = entanglement_entropy(state);
        assert!(
            (position_entropy - coin_entropy).abs() < 1e-10,
            "position {position_entropy} vs coin {coin_entropy}"
        );
    }
}

fn simulated_occupied_probabilities(thetas: &[f64], t: usize) -> Vec<(i64, f64)> {
    let seq = CoinSequence::theta_only(&thetas[..t]).unwrap();
    let initial = WalkerState::symmetric_initial(2 * t + 1).unwrap();
    let states = evolve_boundary_free(&initial, &seq).unwrap();
    let last = states.last().unwrap();
    let p = position_distribution(last);
    let mut out = Vec::new();
    let mut x = -(t as i64);
    while x <= t as i64 {
        out.push((x, p[last.index_of_x(x)]));
        x += 2;
    }
    out
}

#[test]
fn symbolic_probabilities_match_simulation_at_random_angles() {
    let (theta2, theta3) = closed_form_thetas();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..100 {
        let theta1: f64 = rng.random_range(0.0..=FRAC_PI_2);
        let free: f64 = rng.random_range(0.0..=FRAC_PI_2);

        // t = 1: flat split regardless of the angle
        for (x, expected) in uniform_prefix_distribution(1, free) {
            let sim = simulated_occupied_probabilities(&[theta1], 1);
            let got = sim.iter().find(|(sx, _)| *sx == x).unwrap().1;
            assert!((got - expected).abs() < 1e-12, "trial {trial} t=1 x={x}");
        }
        // t = 2: free theta_2
        let sim = simulated_occupied_probabilities(&[theta1, free], 2);
        for (x, expected) in uniform_prefix_distribution(2, free) {
            let got = sim.iter().find(|(sx, _)| *sx == x).unwrap().1;
            assert!((got - expected).abs() < 1e-12, "trial {trial} t=2 x={x}");
        }
        // t = 3: optimal theta_2, free theta_3
        let sim = simulated_occupied_probabilities(&[theta1, theta2, free], 3);
        for (x, expected) in uniform_prefix_distribution(3, free) {
            let got = sim.iter().find(|(sx, _)| *sx == x).unwrap().1;
            assert!((got - expected).abs() < 1e-12, "trial {trial} t=3 x={x}");
        }
        // t = 4: optimal prefix, free theta_4
        let sim = simulated_occupied_probabilities(&[theta1, theta2, theta3, free], 4);
        for (x, expected) in uniform_prefix_distribution(4, free) {
            let got = sim.iter().find(|(sx, _)| *sx == x).unwrap().1;
            assert!((got - expected).abs() < 1e-12, "trial {trial} t=4 x={x}");
        }
    }
}

#[test]
fn four_step_uniformity_is_infeasible_at_the_closed_form_prefix() {
    // edges need cos^2 = 4/5 while equal mid/center probabilities force
    // cos * sin = 0; no theta_4 satisfies both
    let (theta2, theta3) = closed_form_thetas();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let theta4: f64 = rng.random_range(0.0..=FRAC_PI_2);
        let r = qwalk::reference::uniformity_residual(
            &[FRAC_PI_4, theta2, theta3, theta4],
            4,
        )
        .unwrap();
        assert!(r > 1e-3, "residual {r:.3e} at theta4={theta4}");
    }
}
