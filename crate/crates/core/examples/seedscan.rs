// Development probe: seed/restart robustness at T=15.
use qwalk::metrics;
use qwalk::optimize::{minimize_global, ParameterSet, SearchOptions};
use qwalk::walk::{default_sites, evolve, WalkerState};

fn main() {
    let opts = SearchOptions::default();
    for restarts in [200usize, 400] {
        for seed in 1..=6u64 {
            let run = minimize_global(15, ParameterSet::ThetaOnly, restarts, seed, &opts);
            let initial = WalkerState::symmetric_initial(default_sites(15)).unwrap();
            let states = evolve(&initial, &run.best_sequence).unwrap();
            let report = metrics::TrajectoryReport::from_states(&states).unwrap();
            let min_ratio = report.records[1..]
                .iter()
                .map(|r| r.entropy / r.max_entropy)
                .fold(f64::INFINITY, f64::min);
            let var15 = report.records[15].variance;
            let e15 = report.records[15].entanglement;
            let theta_max = run
                .best_sequence
                .thetas()
                .iter()
                .copied()
                .fold(0.0f64, f64::max);
            let nu_even: Vec<f64> = report.records[1..]
                .iter()
                .filter(|r| r.t % 2 == 0)
                .map(|r| r.survival_probability.sqrt() * ((r.t + 1) as f64).sqrt())
                .collect();
            println!(
                "restarts={restarts} seed={seed}: F={:.4e} minratio={min_ratio:.4} var={var15:.2} E={e15:.4} thmax={theta_max:.4} nu=[{:.3},{:.3}]",
                run.best_value,
                nu_even.iter().copied().fold(f64::INFINITY, f64::min),
                nu_even.iter().copied().fold(0.0f64, f64::max),
            );
        }
    }
}
