// Development probe: Fourier-space oracle values to freeze into tests.
use num_complex::Complex64;
use std::f64::consts::PI;

fn fourier_walk_distribution(theta: f64, steps: usize, n: usize) -> Vec<f64> {
    let cos = theta.cos();
    let sin = theta.sin();
    let b = [
        [Complex64::new(cos, 0.0), Complex64::new(sin, 0.0)],
        [Complex64::new(sin, 0.0), Complex64::new(-cos, 0.0)],
    ];
    let inv_sqrt_n = 1.0 / (n as f64).sqrt();
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut modes: Vec<[Complex64; 2]> = (0..n)
        .map(|_| {
            [
                Complex64::new(inv_sqrt2 * inv_sqrt_n, 0.0),
                Complex64::new(0.0, inv_sqrt2 * inv_sqrt_n),
            ]
        })
        .collect();
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
            let x = p as i64 - origin;
            let mut r = Complex64::ZERO;
            let mut l = Complex64::ZERO;
            for (m, mode) in modes.iter().enumerate() {
                let k = 2.0 * PI * m as f64 / n as f64;
                let phase = Complex64::from_polar(inv_sqrt_n, k * x as f64);
                r += phase * mode[0];
                l += phase * mode[1];
            }
            r.norm_sqr() + l.norm_sqr()
        })
        .collect()
}

fn main() {
    let p = fourier_walk_distribution(std::f64::consts::FRAC_PI_4, 100, 201);
    let norm: f64 = p.iter().sum();
    let origin = 100i64;
    let mean: f64 = p
        .iter()
        .enumerate()
        .map(|(i, &v)| (i as i64 - origin) as f64 * v)
        .sum();
    let var: f64 = p
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let x = (i as i64 - origin) as f64;
            x * x * v
        })
        .sum::<f64>()
        - mean * mean;
    println!("hadamard T=100: norm={norm:.15} mean={mean:.3e} var={var:.12}");

    // cross-check against the direct simulation
    let seq = qwalk::walk::CoinSequence::constant_theta(std::f64::consts::FRAC_PI_4, 100).unwrap();
    let s0 = qwalk::walk::WalkerState::symmetric_initial(201).unwrap();
    let states = qwalk::walk::evolve_boundary_free(&s0, &seq).unwrap();
    let psim = qwalk::walk::position_distribution(states.last().unwrap());
    let max_dev = psim
        .iter()
        .zip(&p)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    let var_sim = qwalk::metrics::variance(&psim);
    println!("sim var={var_sim:.12} max|P_sim - P_oracle|={max_dev:.3e}");
}
