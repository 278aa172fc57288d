// Development probe: feasibility floor stability + robustness monotonicity.
use qwalk::optimize::{minimize_global, robustness_scan, ParameterSet, SearchOptions};
use qwalk::reference::verify_uniform_feasibility;
use std::time::Instant;

fn main() {
    for res in [200usize, 400] {
        let start = Instant::now();
        let r = verify_uniform_feasibility(4, res);
        println!(
            "T=4 res={res}: residual={:.6e} arg_min={:?} wall={:.1}s",
            r.residual,
            r.arg_min,
            start.elapsed().as_secs_f64()
        );
    }
    for res in [200usize, 400] {
        let r = verify_uniform_feasibility(3, res);
        println!("T=3 res={res}: residual={:.3e} arg_min={:?}", r.residual, r.arg_min);
    }

    let opts = SearchOptions::default();
    let run10 = minimize_global(10, ParameterSet::ThetaOnly, 50, 1, &opts);
    let amplitudes: Vec<f64> = (0..=10).map(|i| i as f64 * 0.05).collect();
    for seed in [7u64, 13, 42] {
        let scan = robustness_scan(&run10.best_sequence, &amplitudes, 200, seed);
        let mut worst_inversion = 0.0f64;
        for w in scan.mean_ratios.windows(2) {
            if w[1] < w[0] {
                worst_inversion = worst_inversion.max((w[0] - w[1]) / w[0]);
            }
        }
        println!(
            "robustness seed={seed}: means={:?} worst_inversion={:.3}%",
            scan.mean_ratios
                .iter()
                .map(|m| (m * 1000.0).round() / 1000.0)
                .collect::<Vec<_>>(),
            worst_inversion * 100.0
        );
    }
}
