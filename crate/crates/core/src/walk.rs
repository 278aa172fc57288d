//! Walker states and exact unitary evolution under time-dependent coins
//! with cyclic boundary conditions.
//!
//! The position space is a ring of `N` sites (N odd) with the physical
//! origin `x = 0` at index `(N - 1) / 2`. The coin space is two-dimensional
//! with basis ordered `(R, L)`; the amplitude vector stores the full R block
//! followed by the full L block. One step applies the coin rotation at every
//! site and then shifts R amplitudes by `+1` and L amplitudes by `-1`,
//! wrapping around the ring.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

/// Tolerance for the state-normalization invariant.
pub const NORM_TOL: f64 = 1e-12;

/// Coin basis label. `Right` shifts `x -> x + 1`, `Left` shifts `x -> x - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coin {
    Right,
    Left,
}

/// Euler angles of one coin-tossing operator.
///
/// `theta` lives in `[0, pi/2]`; `xi` and `zeta` in `[0, 2*pi)`. The
/// single-parameter walks fix `xi = zeta = pi/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoinParams {
    pub xi: f64,
    pub theta: f64,
    pub zeta: f64,
}

impl CoinParams {
    pub fn new(xi: f64, theta: f64, zeta: f64) -> Result<Self> {
        let p = Self { xi, theta, zeta };
        p.validate()?;
        Ok(p)
    }

    /// Single-parameter coin with `xi = zeta = pi/2`.
    pub fn theta_only(theta: f64) -> Result<Self> {
        Self::new(FRAC_PI_2, theta, FRAC_PI_2)
    }

    pub fn validate(&self) -> Result<()> {
        check_range("theta", self.theta, 0.0, FRAC_PI_2, true)?;
        check_range("xi", self.xi, 0.0, 2.0 * PI, false)?;
        check_range("zeta", self.zeta, 0.0, 2.0 * PI, false)?;
        Ok(())
    }
}

fn check_range(name: &'static str, value: f64, lo: f64, hi: f64, inclusive: bool) -> Result<()> {
    let ok = value >= lo && (value < hi || (inclusive && value == hi));
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::AngleOutOfRange {
            name,
            value,
            lo,
            hi,
        })
    }
}

/// 2x2 coin matrix in the `(R, L)` basis; `m[0][0]` maps `|R>` to `|R>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinMatrix(pub [[Complex64; 2]; 2]);

/// Build the SU(2) coin-tossing matrix for the given angles.
///
/// The overall phase is fixed so that `xi = zeta = pi/2` yields the real
/// matrix `[[cos t, sin t], [sin t, -cos t]]`; `theta = pi/4` is then the
/// Hadamard coin, `theta = 0` is sigma_z and `theta = pi/2` is sigma_x.
pub fn coin_matrix(params: &CoinParams) -> Result<CoinMatrix> {
    params.validate()?;
    let (s, c) = params.theta.sin_cos();
    let phase = Complex64::from_polar(1.0, -(params.xi + params.zeta) / 2.0);
    let e_xi = Complex64::from_polar(1.0, params.xi);
    let e_zeta = Complex64::from_polar(1.0, params.zeta);
    Ok(CoinMatrix([
        [phase * e_xi * c, phase * e_zeta * s],
        [phase * -e_zeta.conj() * s, phase * e_xi.conj() * c],
    ]))
}

/// Ordered list of per-step coin parameters; `steps[t]` drives step `t + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoinSequence {
    steps: Vec<CoinParams>,
}

impl CoinSequence {
    pub fn new(steps: Vec<CoinParams>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::EmptySequence);
        }
        for p in &steps {
            p.validate()?;
        }
        Ok(Self { steps })
    }

    /// Sequence of single-parameter coins.
    pub fn theta_only(thetas: &[f64]) -> Result<Self> {
        Self::new(
            thetas
                .iter()
                .map(|&t| CoinParams::theta_only(t))
                .collect::<Result<_>>()?,
        )
    }

    /// Constant single-parameter coin repeated for `len` steps.
    pub fn constant_theta(theta: f64, len: usize) -> Result<Self> {
        Self::theta_only(&vec![theta; len])
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn steps(&self) -> &[CoinParams] {
        &self.steps
    }

    pub fn thetas(&self) -> Vec<f64> {
        self.steps.iter().map(|p| p.theta).collect()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, CoinParams> {
        self.steps.iter()
    }
}

/// Smallest ring that keeps a `steps`-step walk from the origin away from
/// the wrap-around: `N = 2T + 1`.
pub fn default_sites(steps: usize) -> usize {
    2 * steps + 1
}

fn wrap_position(x: i64, n_sites: usize) -> usize {
    let origin = (n_sites as i64 - 1) / 2;
    (x + origin).rem_euclid(n_sites as i64) as usize
}

/// Normalized walker state on a ring of `n_sites` positions.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkerState {
    n_sites: usize,
    /// Length `2 * n_sites`: R amplitudes for positions `0..N`, then L.
    amplitudes: Vec<Complex64>,
}

impl WalkerState {
    /// Wrap raw amplitudes, checking the site count and normalization.
    pub fn from_amplitudes(n_sites: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if n_sites < 3 || n_sites % 2 == 0 {
            return Err(Error::InvalidSiteCount(n_sites));
        }
        assert_eq!(amplitudes.len(), 2 * n_sites, "amplitude vector length");
        let state = Self {
            n_sites,
            amplitudes,
        };
        let norm = state.norm_sq();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NegativeProbability {
                index: usize::MAX,
                value: norm,
            });
        }
        Ok(state)
    }

    /// The symmetric localized start: amplitude `1/sqrt(2)` on `(x=0, R)` and
    /// `i/sqrt(2)` on `(x=0, L)`.
    pub fn symmetric_initial(n_sites: usize) -> Result<Self> {
        if n_sites < 3 || n_sites % 2 == 0 {
            return Err(Error::InvalidSiteCount(n_sites));
        }
        let mut amplitudes = vec![Complex64::ZERO; 2 * n_sites];
        let origin = (n_sites - 1) / 2;
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        amplitudes[origin] = Complex64::new(inv_sqrt2, 0.0);
        amplitudes[n_sites + origin] = Complex64::new(0.0, inv_sqrt2);
        Ok(Self {
            n_sites,
            amplitudes,
        })
    }

    /// Basis state `|x, coin>`, mainly for tests and operator columns.
    pub fn basis_state(n_sites: usize, x: i64, coin: Coin) -> Result<Self> {
        if n_sites < 3 || n_sites % 2 == 0 {
            return Err(Error::InvalidSiteCount(n_sites));
        }
        let p = wrap_position(x, n_sites);
        let mut amplitudes = vec![Complex64::ZERO; 2 * n_sites];
        let idx = match coin {
            Coin::Right => p,
            Coin::Left => n_sites + p,
        };
        amplitudes[idx] = Complex64::ONE;
        Ok(Self {
            n_sites,
            amplitudes,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Array index of the physical origin `x = 0`.
    pub fn origin_index(&self) -> usize {
        (self.n_sites - 1) / 2
    }

    /// Physical coordinate of position index `p`.
    pub fn x_of(&self, p: usize) -> i64 {
        p as i64 - self.origin_index() as i64
    }

    /// Position index for physical coordinate `x` (wrapping on the ring).
    pub fn index_of_x(&self, x: i64) -> usize {
        wrap_position(x, self.n_sites)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// R-coin amplitudes over positions `0..N`.
    pub fn r_block(&self) -> &[Complex64] {
        &self.amplitudes[..self.n_sites]
    }

    /// L-coin amplitudes over positions `0..N`.
    pub fn l_block(&self) -> &[Complex64] {
        &self.amplitudes[self.n_sites..]
    }

    pub fn amp(&self, x: i64, coin: Coin) -> Complex64 {
        let p = self.index_of_x(x);
        match coin {
            Coin::Right => self.amplitudes[p],
            Coin::Left => self.amplitudes[self.n_sites + p],
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Inner product `<self | other>`.
    pub fn overlap(&self, other: &WalkerState) -> Complex64 {
        assert_eq!(self.n_sites, other.n_sites, "state sizes must match");
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Apply coin then shift, writing into `dst`. `src` and `dst` must be
/// distinct buffers of length `2 * n`.
pub(crate) fn step_into(n: usize, src: &[Complex64], coin: &CoinMatrix, dst: &mut [Complex64]) {
    let [[m00, m01], [m10, m11]] = coin.0;
    for p in 0..n {
        let a = src[p];
        let b = src[n + p];
        let r = m00 * a + m01 * b;
        let l = m10 * a + m11 * b;
        let right = if p + 1 == n { 0 } else { p + 1 };
        let left = if p == 0 { n - 1 } else { p - 1 };
        dst[right] = r;
        dst[n + left] = l;
    }
}

/// One evolution step: coin rotation followed by the cyclic shift.
pub fn step(state: &WalkerState, params: &CoinParams) -> Result<WalkerState> {
    let coin = coin_matrix(params)?;
    let n = state.n_sites;
    let mut amplitudes = vec![Complex64::ZERO; 2 * n];
    step_into(n, &state.amplitudes, &coin, &mut amplitudes);
    Ok(WalkerState {
        n_sites: n,
        amplitudes,
    })
}

/// Evolve through the whole sequence, returning all `T + 1` states
/// (element `t` is the state after `t` steps).
pub fn evolve(initial: &WalkerState, seq: &CoinSequence) -> Result<Vec<WalkerState>> {
    let mut states = Vec::with_capacity(seq.len() + 1);
    states.push(initial.clone());
    for params in seq.iter() {
        let next = step(states.last().expect("nonempty"), params)?;
        states.push(next);
    }
    Ok(states)
}

/// Like [`evolve`] but requires the ring to be large enough that the light
/// cone from the origin never reaches the wrap-around.
pub fn evolve_boundary_free(initial: &WalkerState, seq: &CoinSequence) -> Result<Vec<WalkerState>> {
    let needed = default_sites(seq.len());
    if initial.n_sites() < needed {
        return Err(Error::BoundaryTooSmall {
            steps: seq.len(),
            needed,
            n_sites: initial.n_sites(),
        });
    }
    evolve(initial, seq)
}

/// Position distribution `P_x = |psi_{x,L}|^2 + |psi_{x,R}|^2`, indexed by
/// position index `p` (use [`WalkerState::x_of`] for coordinates).
pub fn position_distribution(state: &WalkerState) -> Vec<f64> {
    let n = state.n_sites;
    (0..n)
        .map(|p| state.amplitudes[p].norm_sqr() + state.amplitudes[n + p].norm_sqr())
        .collect()
}

/// Raw (unnormalized) component distributions `(P_L, P_R)`; they sum
/// elementwise to [`position_distribution`].
pub fn component_distributions(state: &WalkerState) -> (Vec<f64>, Vec<f64>) {
    let n = state.n_sites;
    let p_l = state.amplitudes[n..].iter().map(|a| a.norm_sqr()).collect();
    let p_r = state.amplitudes[..n].iter().map(|a| a.norm_sqr()).collect();
    (p_l, p_r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: Complex64, b: Complex64, tol: f64) {
        assert!(
            (a - b).norm() < tol,
            "expected {b}, got {a} (|diff|={})",
            (a - b).norm()
        );
    }

    #[test]
    fn hadamard_coin_entries() {
        let m = coin_matrix(&CoinParams::theta_only(std::f64::consts::FRAC_PI_4).unwrap())
            .unwrap()
            .0;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_close(m[0][0], Complex64::new(h, 0.0), 1e-15);
        assert_close(m[0][1], Complex64::new(h, 0.0), 1e-15);
        assert_close(m[1][0], Complex64::new(h, 0.0), 1e-15);
        assert_close(m[1][1], Complex64::new(-h, 0.0), 1e-15);
    }

    #[test]
    fn sigma_z_and_sigma_x_coins() {
        let z = coin_matrix(&CoinParams::theta_only(0.0).unwrap()).unwrap().0;
        assert_close(z[0][0], Complex64::ONE, 1e-15);
        assert_close(z[0][1], Complex64::ZERO, 1e-15);
        assert_close(z[1][0], Complex64::ZERO, 1e-15);
        assert_close(z[1][1], -Complex64::ONE, 1e-15);

        let x = coin_matrix(&CoinParams::theta_only(FRAC_PI_2).unwrap())
            .unwrap()
            .0;
        assert_close(x[0][0], Complex64::ZERO, 1e-15);
        assert_close(x[0][1], Complex64::ONE, 1e-15);
        assert_close(x[1][0], Complex64::ONE, 1e-15);
        assert_close(x[1][1], Complex64::ZERO, 1e-15);
    }

    #[test]
    fn coin_is_unitary() {
        let m = coin_matrix(&CoinParams::new(1.3, 0.7, 5.1).unwrap())
            .unwrap()
            .0;
        // columns orthonormal
        let c0 = m[0][0].norm_sqr() + m[1][0].norm_sqr();
        let c1 = m[0][1].norm_sqr() + m[1][1].norm_sqr();
        let dot = m[0][0].conj() * m[0][1] + m[1][0].conj() * m[1][1];
        assert!((c0 - 1.0).abs() < 1e-14);
        assert!((c1 - 1.0).abs() < 1e-14);
        assert!(dot.norm() < 1e-14);
    }

    #[test]
    fn angle_validation() {
        assert!(CoinParams::new(0.0, -0.1, 0.0).is_err());
        assert!(CoinParams::new(0.0, FRAC_PI_2 + 0.1, 0.0).is_err());
        assert!(CoinParams::new(2.0 * PI, 0.3, 0.0).is_err());
        assert!(CoinParams::new(0.0, 0.3, -1.0).is_err());
        assert!(CoinParams::new(0.0, FRAC_PI_2, 6.28).is_ok());
    }

    #[test]
    fn symmetric_initial_is_normalized_delta() {
        let s = WalkerState::symmetric_initial(31).unwrap();
        assert!((s.norm_sq() - 1.0).abs() < 1e-15);
        let p = position_distribution(&s);
        assert_eq!(p.len(), 31);
        assert!((p[s.origin_index()] - 1.0).abs() < 1e-15);
        assert_eq!(p.iter().filter(|&&v| v != 0.0).count(), 1);
        assert!(WalkerState::symmetric_initial(4).is_err());
        assert!(WalkerState::symmetric_initial(1).is_err());
    }

    #[test]
    fn first_step_is_fifty_fifty_for_any_theta() {
        for theta in [0.0, 0.3, std::f64::consts::FRAC_PI_4, 1.2, FRAC_PI_2] {
            let s = WalkerState::symmetric_initial(5).unwrap();
            let s1 = step(&s, &CoinParams::theta_only(theta).unwrap()).unwrap();
            let p = position_distribution(&s1);
            assert!((p[s1.index_of_x(1)] - 0.5).abs() < 1e-15, "theta={theta}");
            assert!((p[s1.index_of_x(-1)] - 0.5).abs() < 1e-15, "theta={theta}");
        }
    }

    #[test]
    fn sigma_z_moves_right_component_right() {
        let s = WalkerState::basis_state(5, 0, Coin::Right).unwrap();
        let s1 = step(&s, &CoinParams::theta_only(0.0).unwrap()).unwrap();
        assert_close(s1.amp(1, Coin::Right), Complex64::ONE, 1e-15);
        assert!((s1.norm_sq() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_steps_reach_one_third_uniform() {
        let theta2 = (1.0 / 2.0f64.sqrt()).atan();
        let seq = CoinSequence::theta_only(&[0.9, theta2]).unwrap();
        let s = WalkerState::symmetric_initial(5).unwrap();
        let states = evolve(&s, &seq).unwrap();
        let p = position_distribution(&states[2]);
        for x in [-2i64, 0, 2] {
            assert!(
                (p[states[2].index_of_x(x)] - 1.0 / 3.0).abs() < 1e-15,
                "x={x}"
            );
        }
    }

    #[test]
    fn sigma_z_walk_splits_ballistically() {
        let seq = CoinSequence::constant_theta(0.0, 10).unwrap();
        let s = WalkerState::symmetric_initial(default_sites(10)).unwrap();
        let states = evolve_boundary_free(&s, &seq).unwrap();
        let last = states.last().unwrap();
        let p = position_distribution(last);
        assert!((p[last.index_of_x(10)] - 0.5).abs() < 1e-15);
        assert!((p[last.index_of_x(-10)] - 0.5).abs() < 1e-15);
        let bulk: f64 = (-9..=9).map(|x| p[last.index_of_x(x)]).sum();
        assert!(bulk < 1e-15);
    }

    #[test]
    fn evolve_returns_t_plus_one_states() {
        let s = WalkerState::symmetric_initial(7).unwrap();
        let seq = CoinSequence::constant_theta(0.5, 3).unwrap();
        let states = evolve(&s, &seq).unwrap();
        assert_eq!(states.len(), 4);
        assert_eq!(states[0], s);
    }

    #[test]
    fn boundary_free_needs_enough_sites() {
        let s = WalkerState::symmetric_initial(5).unwrap();
        let seq = CoinSequence::constant_theta(0.5, 3).unwrap();
        assert!(evolve_boundary_free(&s, &seq).is_err());
        let s = WalkerState::symmetric_initial(7).unwrap();
        assert!(evolve_boundary_free(&s, &seq).is_ok());
    }

    #[test]
    fn component_distributions_split_total() {
        let s = WalkerState::symmetric_initial(9).unwrap();
        let states = evolve(&s, &CoinSequence::theta_only(&[0.7, 0.2, 1.1]).unwrap()).unwrap();
        let last = states.last().unwrap();
        let p = position_distribution(last);
        let (p_l, p_r) = component_distributions(last);
        for i in 0..p.len() {
            assert!((p_l[i] + p_r[i] - p[i]).abs() < 1e-15);
        }
        let mass: f64 = p_l.iter().sum::<f64>() + p_r.iter().sum::<f64>();
        assert!((mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_initial_components() {
        let s = WalkerState::symmetric_initial(5).unwrap();
        let (p_l, p_r) = component_distributions(&s);
        assert!((p_l[s.origin_index()] - 0.5).abs() < 1e-15);
        assert!((p_r[s.origin_index()] - 0.5).abs() < 1e-15);
    }
}
