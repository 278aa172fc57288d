// Development probe: optimizer quality at acceptance-relevant sizes.
use qwalk::metrics::{self, averaged_probability_overlap};
use qwalk::optimize::{minimize_final_step, minimize_global, minimize_stepwise, ParameterSet, SearchOptions};
use qwalk::walk::{default_sites, evolve, WalkerState};
use std::time::Instant;

fn main() {
    let opts = SearchOptions::default();

    for (t, restarts) in [(10usize, 50usize), (15, 50), (15, 200), (15, 400)] {
        let start = Instant::now();
        let run = minimize_global(t, ParameterSet::ThetaOnly, restarts, 1, &opts);
        let dt = start.elapsed().as_secs_f64();
        let initial = WalkerState::symmetric_initial(default_sites(t)).unwrap();
        let states = evolve(&initial, &run.best_sequence).unwrap();
        let report = metrics::TrajectoryReport::from_states(&states).unwrap();
        let min_ratio = report.records[1..]
            .iter()
            .map(|r| r.entropy / r.max_entropy)
            .fold(f64::INFINITY, f64::min);
        let var_final = report.records[t].variance;
        let ent_final = report.records[t].entanglement;
        let nu_band: Vec<f64> = report.records[1..]
            .iter()
            .filter(|r| r.t % 2 == 0)
            .map(|r| r.survival_probability.sqrt() * ((r.t + 1) as f64).sqrt())
            .collect();
        let nu_odd_max = report.records[1..]
            .iter()
            .filter(|r| r.t % 2 == 1)
            .map(|r| r.survival_probability)
            .fold(0.0f64, f64::max);
        println!("  odd-t survival max = {nu_odd_max:.3e}");
        let theta_max = run
            .best_sequence
            .thetas()
            .iter()
            .copied()
            .fold(0.0f64, f64::max);
        println!(
            "T={t} restarts={restarts} F={:.6e} wall={dt:.1}s evals={}
  min S/Smax = {min_ratio:.5}  var({t}) = {var_final:.3} (uniform {:.3})
  E({t}) = {ent_final:.5} (log2 = {:.5})  theta_max = {theta_max:.4}
  |nu|*sqrt(t+1) range = [{:.3}, {:.3}]",
            run.best_value,
            run.evaluations,
            metrics::uniform_variance(t),
            std::f64::consts::LN_2,
            nu_band.iter().copied().fold(f64::INFINITY, f64::min),
            nu_band.iter().copied().fold(0.0f64, f64::max),
        );
        println!("  thetas = {:?}", run.best_sequence.thetas());
        println!(
            "  ledger values: {:?}",
            run.ledger.iter().take(5).map(|e| e.value).collect::<Vec<_>>()
        );
    }

    // T=25: global vs stepwise, probability overlap average
    let start = Instant::now();
    let run25 = minimize_global(25, ParameterSet::ThetaOnly, 50, 1, &opts);
    let dt = start.elapsed().as_secs_f64();
    let initial = WalkerState::symmetric_initial(default_sites(25)).unwrap();
    let states = evolve(&initial, &run25.best_sequence).unwrap();
    let dp_avg = averaged_probability_overlap(&states);
    println!(
        "T=25 global F={:.6e} wall={dt:.1}s  avg Delta_P = {dp_avg:.4}",
        run25.best_value
    );
    let stepwise25 = minimize_stepwise(25, 0);
    println!(
        "T=25 stepwise F={:.6e} (global {:.6e}); stepwise theta_max={:.4}",
        stepwise25.best_value,
        run25.best_value,
        stepwise25
            .best_sequence
            .thetas()
            .iter()
            .copied()
            .fold(0.0f64, f64::max)
    );

    // final-step objective at T=15
    let f15 = minimize_final_step(15, ParameterSet::ThetaOnly, 50, 1, &opts);
    println!(
        "T=15 final-step F'={:.6e}, global F={:.6e}",
        f15.best_value,
        minimize_global(15, ParameterSet::ThetaOnly, 50, 1, &opts).best_value
    );
    let fthetas = f15.best_sequence.thetas();
    println!(
        "  final-step theta_max = {:.4}, theta_min = {:.4}",
        fthetas.iter().copied().fold(0.0f64, f64::max),
        fthetas.iter().copied().fold(f64::INFINITY, f64::min)
    );

    // full SU(2) vs theta-only at small T
    let t5_theta = minimize_global(5, ParameterSet::ThetaOnly, 6, 7, &opts);
    let t5_full = minimize_global(5, ParameterSet::FullSu2, 60, 7, &opts);
    println!(
        "T=5 theta-only F={:.6e}, full SU(2) F={:.6e}",
        t5_theta.best_value, t5_full.best_value
    );
}
