//! Scalar diagnostics of walk trajectories: entropies, spread objectives,
//! variance, entanglement, component overlaps, and survival probabilities.
//!
//! All entropies use natural logarithms.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::walk::{
    self, coin_matrix, component_distributions, default_sites, position_distribution,
    CoinSequence, WalkerState,
};

/// Shannon entropy `-sum P_x ln P_x` in nats, with `0 ln 0 := 0`.
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for (index, &v) in p.iter().enumerate() {
        if v < 0.0 {
            return Err(Error::NegativeProbability { index, value: v });
        }
        if v > 0.0 {
            s -= v * v.ln();
        }
    }
    Ok(s)
}

/// Largest entropy reachable after `t` steps: `ln(t + 1)` (parity halves the
/// light cone to `t + 1` occupiable sites).
pub fn max_entropy(t: usize) -> f64 {
    ((t + 1) as f64).ln()
}

/// Spread objective from the entropy trace `S(1), ..., S(T)`:
/// `F = 1 - (1/T) sum_t S(t) / ln(t + 1)`.
///
/// `F = 0` iff the distribution is maximally spread at every step; `F = 1`
/// for a walker that stays localized (`S(t) = 0` for all `t >= 1`).
pub fn spread_objective_from_entropies(entropies: &[f64]) -> f64 {
    let t_max = entropies.len();
    if t_max == 0 {
        return 0.0;
    }
    let sum: f64 = entropies
        .iter()
        .enumerate()
        .map(|(i, &s)| s / max_entropy(i + 1))
        .sum();
    1.0 - sum / t_max as f64
}

/// Final-step objective `F' = 1 - S(T) / ln(T + 1)`.
pub fn final_step_objective_from_entropy(entropy_final: f64, t_final: usize) -> f64 {
    1.0 - entropy_final / max_entropy(t_final)
}

/// Whole-history spread objective `F` for a sequence, evolving the symmetric
/// initial state on the default `2T + 1` ring.
pub fn spread_objective(seq: &CoinSequence) -> f64 {
    SpreadEvaluator::new(seq.len()).spread_objective(seq)
}

/// Final-step objective `F'` for a sequence on the default ring.
pub fn final_step_objective(seq: &CoinSequence) -> f64 {
    SpreadEvaluator::new(seq.len()).final_step_objective(seq)
}

/// Reusable evaluator for the spread objectives.
///
/// Keeps two amplitude buffers so that repeated objective evaluations (the
/// optimizer performs millions) do not allocate.
pub struct SpreadEvaluator {
    n_sites: usize,
    buf_a: Vec<Complex64>,
    buf_b: Vec<Complex64>,
}

impl SpreadEvaluator {
    /// Evaluator for sequences of exactly `steps` steps (ring `2T + 1`).
    pub fn new(steps: usize) -> Self {
        Self::with_sites(default_sites(steps))
    }

    pub fn with_sites(n_sites: usize) -> Self {
        assert!(n_sites >= 3 && n_sites % 2 == 1, "ring must be odd, >= 3");
        Self {
            n_sites,
            buf_a: vec![Complex64::ZERO; 2 * n_sites],
            buf_b: vec![Complex64::ZERO; 2 * n_sites],
        }
    }

    fn reset(&mut self) {
        let n = self.n_sites;
        self.buf_a.fill(Complex64::ZERO);
        let origin = (n - 1) / 2;
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        self.buf_a[origin] = Complex64::new(inv_sqrt2, 0.0);
        self.buf_a[n + origin] = Complex64::new(0.0, inv_sqrt2);
    }

    fn entropy_of_current(&self) -> f64 {
        let n = self.n_sites;
        let mut s = 0.0;
        for p in 0..n {
            let prob = self.buf_a[p].norm_sqr() + self.buf_a[n + p].norm_sqr();
            if prob > 0.0 {
                s -= prob * prob.ln();
            }
        }
        s
    }

    /// Entropy trace `S(1), ..., S(T)` of the walk driven by `seq`.
    pub fn entropy_trace(&mut self, seq: &CoinSequence) -> Vec<f64> {
        assert!(
            self.n_sites >= default_sites(seq.len()),
            "ring too small for sequence"
        );
        self.reset();
        let mut out = Vec::with_capacity(seq.len());
        for params in seq.iter() {
            let coin = coin_matrix(params).expect("validated sequence");
            walk::step_into(self.n_sites, &self.buf_a, &coin, &mut self.buf_b);
            std::mem::swap(&mut self.buf_a, &mut self.buf_b);
            out.push(self.entropy_of_current());
        }
        out
    }

    /// Whole-history objective `F` for `seq`.
    pub fn spread_objective(&mut self, seq: &CoinSequence) -> f64 {
        let entropies = self.entropy_trace(seq);
        spread_objective_from_entropies(&entropies)
    }

    /// Final-step objective `F'` for `seq`.
    pub fn final_step_objective(&mut self, seq: &CoinSequence) -> f64 {
        let entropies = self.entropy_trace(seq);
        final_step_objective_from_entropy(*entropies.last().expect("nonempty"), seq.len())
    }
}

/// Mean physical position of a distribution indexed by ring position.
pub fn mean_position(p: &[f64]) -> f64 {
    let origin = (p.len() - 1) / 2;
    p.iter()
        .enumerate()
        .map(|(i, &v)| (i as f64 - origin as f64) * v)
        .sum()
}

/// Variance `<x^2> - <x>^2` in physical site coordinates.
pub fn variance(p: &[f64]) -> f64 {
    let origin = (p.len() - 1) / 2;
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    for (i, &v) in p.iter().enumerate() {
        let x = i as f64 - origin as f64;
        m1 += x * v;
        m2 += x * x * v;
    }
    m2 - m1 * m1
}

/// Variance of an idealized uniform walk after `t` steps:
/// `t (t^2 + 3t + 2) / (3 (t + 1))`.
pub fn uniform_variance(t: usize) -> f64 {
    let t = t as f64;
    t * (t * t + 3.0 * t + 2.0) / (3.0 * (t + 1.0))
}

/// Coin-position entanglement: von Neumann entropy (nats) of the reduced
/// coin density matrix. Equals the position-side entropy for pure states.
pub fn entanglement_entropy(state: &WalkerState) -> f64 {
    let r = state.r_block();
    let l = state.l_block();
    let mut rr = 0.0;
    let mut ll = 0.0;
    let mut rl = Complex64::ZERO;
    for (a, b) in r.iter().zip(l) {
        rr += a.norm_sqr();
        ll += b.norm_sqr();
        rl += a * b.conj();
    }
    let mid = (rr + ll) / 2.0;
    let half_diff = (rr - ll) / 2.0;
    let radius = (half_diff * half_diff + rl.norm_sqr()).sqrt();
    let lambda = [(mid + radius).clamp(0.0, 1.0), (mid - radius).clamp(0.0, 1.0)];
    -lambda
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| v * v.ln())
        .sum::<f64>()
}

/// Overlap `<psi_R | psi_L>` of the raw coin components.
pub fn component_overlap(state: &WalkerState) -> Complex64 {
    state
        .r_block()
        .iter()
        .zip(state.l_block())
        .map(|(r, l)| r.conj() * l)
        .sum()
}

/// Amplitude overlap `Delta_A = |<psi_R | psi_L>|^2` of the raw components.
///
/// With the component norms summing to one, `Delta_A <= 1/4`; the symmetric
/// initial state sits exactly at `1/4`.
pub fn amplitude_overlap(state: &WalkerState) -> f64 {
    component_overlap(state).norm_sqr()
}

/// Probability overlap `Delta_P = sum_x min(P_L, P_R)` of the raw component
/// distributions.
///
/// Raw components carry mass `1/2` each for the symmetric walks, so two
/// coincident halves give `Delta_P = 1/2`, the attainable maximum.
pub fn probability_overlap(state: &WalkerState) -> f64 {
    let (p_l, p_r) = component_distributions(state);
    p_l.iter().zip(&p_r).map(|(a, b)| a.min(*b)).sum()
}

/// Time average `(1/T) sum_{t=1}^T Delta_A(t)` over an evolve() trajectory.
pub fn averaged_amplitude_overlap(states: &[WalkerState]) -> f64 {
    average_skipping_initial(states, amplitude_overlap)
}

/// Time average `(1/T) sum_{t=1}^T Delta_P(t)` over an evolve() trajectory.
pub fn averaged_probability_overlap(states: &[WalkerState]) -> f64 {
    average_skipping_initial(states, probability_overlap)
}

fn average_skipping_initial(states: &[WalkerState], f: impl Fn(&WalkerState) -> f64) -> f64 {
    assert!(states.len() > 1, "trajectory must contain at least one step");
    let t = states.len() - 1;
    states[1..].iter().map(f).sum::<f64>() / t as f64
}

/// Survival amplitudes `nu(t) = <psi(0) | psi(t)>` for `t = 0..T`.
pub fn survival_amplitudes(states: &[WalkerState]) -> Vec<Complex64> {
    let initial = &states[0];
    states.iter().map(|s| initial.overlap(s)).collect()
}

/// Survival probabilities `|nu(t)|^2` for `t = 0..T`.
pub fn survival_probabilities(states: &[WalkerState]) -> Vec<f64> {
    survival_amplitudes(states)
        .iter()
        .map(|v| v.norm_sqr())
        .collect()
}

/// Cesaro averages `<|nu|^2>_T = (1/T) sum_{t=1}^T |nu(t)|^2` for
/// `T = 1..=T_max`, given the survival probabilities indexed from `t = 0`.
pub fn cesaro_average(survival_sq: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(survival_sq.len().saturating_sub(1));
    let mut sum = 0.0;
    for (t, &v) in survival_sq.iter().enumerate().skip(1) {
        sum += v;
        out.push(sum / t as f64);
    }
    out
}

/// Closed-form reference curves for an idealized uniformly spreading walker.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UniformReferences {
    /// `|nu_uni(t)| = 1 / sqrt(t + 1)` for `t = 0..=T`.
    pub survival_abs: Vec<f64>,
    /// `<|nu|^2>_T^uni = (1/T) sum_{t=1}^T 1/(t+1)` for `T = 1..=T`.
    pub cesaro: Vec<f64>,
}

impl UniformReferences {
    pub fn new(t_max: usize) -> Self {
        let survival_abs: Vec<f64> = (0..=t_max).map(|t| 1.0 / ((t + 1) as f64).sqrt()).collect();
        let mut cesaro = Vec::with_capacity(t_max);
        let mut sum = 0.0;
        for t in 1..=t_max {
            sum += 1.0 / (t + 1) as f64;
            cesaro.push(sum / t as f64);
        }
        Self {
            survival_abs,
            cesaro,
        }
    }
}

/// The uniform comparison wavefunction: equal real amplitudes on every
/// `(x, c)` with `|x| <= t_max`, normalized, on a `2 * t_max + 1` ring.
pub fn uniform_state(t_max: usize) -> Result<WalkerState> {
    let n = default_sites(t_max);
    let amp = Complex64::new(1.0 / (2.0 * n as f64).sqrt(), 0.0);
    WalkerState::from_amplitudes(n, vec![amp; 2 * n])
}

/// Relative L1 distance between theta sequences:
/// `sum_i |theta_i_ref - theta_i| / sum_i theta_i_ref`.
pub fn sequence_distance(reference: &CoinSequence, other: &CoinSequence) -> Result<f64> {
    if reference.len() != other.len() {
        return Err(Error::LengthMismatch(reference.len(), other.len()));
    }
    let denom: f64 = reference.iter().map(|p| p.theta).sum();
    if denom == 0.0 {
        return Err(Error::ZeroReferenceNorm);
    }
    let num: f64 = reference
        .iter()
        .zip(other.iter())
        .map(|(a, b)| (a.theta - b.theta).abs())
        .sum();
    Ok(num / denom)
}

/// Per-step diagnostics of one trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: usize,
    /// Shannon entropy `S(t)` of the position distribution, nats.
    pub entropy: f64,
    /// `ln(t + 1)`.
    pub max_entropy: f64,
    /// Position variance, sites^2.
    pub variance: f64,
    /// Coin-position entanglement entropy, nats.
    pub entanglement: f64,
    /// `Delta_A(t)`.
    pub amplitude_overlap: f64,
    /// `Delta_P(t)`.
    pub probability_overlap: f64,
    /// `|nu(t)|^2`.
    pub survival_probability: f64,
}

/// Full diagnostic table of a trajectory, one record per time step
/// (including `t = 0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryReport {
    pub n_sites: usize,
    pub records: Vec<StepRecord>,
}

impl TrajectoryReport {
    /// Compute every diagnostic over an evolve() trajectory.
    pub fn from_states(states: &[WalkerState]) -> Result<Self> {
        assert!(!states.is_empty());
        let nu = survival_amplitudes(states);
        let mut records = Vec::with_capacity(states.len());
        for (t, state) in states.iter().enumerate() {
            let p = position_distribution(state);
            records.push(StepRecord {
                t,
                entropy: shannon_entropy(&p)?,
                max_entropy: max_entropy(t),
                variance: variance(&p),
                entanglement: entanglement_entropy(state),
                amplitude_overlap: amplitude_overlap(state),
                probability_overlap: probability_overlap(state),
                survival_probability: nu[t].norm_sqr(),
            });
        }
        Ok(Self {
            n_sites: states[0].n_sites(),
            records,
        })
    }

    /// Number of evolution steps covered (records minus the `t = 0` row).
    pub fn steps(&self) -> usize {
        self.records.len() - 1
    }

    /// Whole-history spread objective recomputed from the stored entropies.
    pub fn spread_objective(&self) -> f64 {
        let entropies: Vec<f64> = self.records[1..].iter().map(|r| r.entropy).collect();
        spread_objective_from_entropies(&entropies)
    }
}
