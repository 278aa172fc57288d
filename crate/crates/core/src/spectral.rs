//! Total evolution operators, quasi-energy spectra, density of states,
//! spectral gaps, and constant-coin dispersion relations.
//!
//! Quasi-energies are `eps_n = i log(lambda_n)` for eigenvalues `lambda_n`
//! of the unitary evolution operator, mapped to the branch `(-pi, pi]`.
//! Dense diagonalization is affordable at the sizes of interest
//! (`2N x 2N` with `N` up to a few thousand); the constant-coin momentum
//! blocks provide an independent exact route used for cross-checks.

use ndarray::Array2;
use ndarray_linalg::EigVals;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::walk::{self, coin_matrix, CoinParams, CoinSequence};

/// Eigenvalues below this are treated as zero when locating the gap.
pub const GAP_ZERO_TOL: f64 = 1e-9;

/// Largest acceptable unitarity deviation of a spectrum input.
pub const UNITARITY_TOL: f64 = 1e-8;

/// Default number of density-of-states bins.
pub const DEFAULT_DOS_BINS: usize = 64;

/// Dense `2N x 2N` evolution operator for the whole sequence, cyclic
/// boundaries, basis layout `[R block | L block]` matching `WalkerState`.
pub fn total_operator(seq: &CoinSequence, n_sites: usize) -> Result<Array2<Complex64>> {
    if n_sites < 3 || n_sites % 2 == 0 {
        return Err(Error::InvalidSiteCount(n_sites));
    }
    let dim = 2 * n_sites;
    let coins: Vec<_> = seq
        .iter()
        .map(coin_matrix)
        .collect::<Result<Vec<_>>>()?;
    let mut u = Array2::<Complex64>::zeros((dim, dim));
    let mut src = vec![Complex64::ZERO; dim];
    let mut dst = vec![Complex64::ZERO; dim];
    for col in 0..dim {
        src.fill(Complex64::ZERO);
        src[col] = Complex64::ONE;
        for coin in &coins {
            walk::step_into(n_sites, &src, coin, &mut dst);
            std::mem::swap(&mut src, &mut dst);
        }
        for row in 0..dim {
            u[[row, col]] = src[row];
        }
    }
    Ok(u)
}

/// Max-norm deviation of `U^dagger U` from the identity.
pub fn unitarity_deviation(u: &Array2<Complex64>) -> f64 {
    let uh = u.t().mapv(|z| z.conj());
    let gram = uh.dot(u);
    let n = gram.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let expected = if i == j {
                Complex64::ONE
            } else {
                Complex64::ZERO
            };
            worst = worst.max((gram[[i, j]] - expected).norm());
        }
    }
    worst
}

/// Density-of-states histogram over the quasi-energy branch `(-pi, pi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DosHistogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl DosHistogram {
    fn new(quasi_energies: &[f64], bins: usize) -> Self {
        assert!(bins >= 1);
        let width = 2.0 * PI / bins as f64;
        let bin_edges: Vec<f64> = (0..=bins).map(|i| -PI + i as f64 * width).collect();
        let mut counts = vec![0usize; bins];
        for &e in quasi_energies {
            let idx = (((e + PI) / width).floor() as isize).clamp(0, bins as isize - 1) as usize;
            counts[idx] += 1;
        }
        Self { bin_edges, counts }
    }

    pub fn bin_centers(&self) -> Vec<f64> {
        self.bin_edges
            .windows(2)
            .map(|w| 0.5 * (w[0] + w[1]))
            .collect()
    }
}

/// Quasi-energy spectrum of one evolution operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub n_sites: usize,
    /// Sorted ascending, `2 * n_sites` values in `(-pi, pi]`.
    pub quasi_energies: Vec<f64>,
    /// Smallest quasi-energy above [`GAP_ZERO_TOL`], if any.
    pub gap: Option<f64>,
    pub dos: DosHistogram,
    /// Largest `| |lambda_n| - 1 |` over the eigenvalues.
    pub max_modulus_deviation: f64,
    /// Whether every `eps` has a partner `-eps` within 1e-9.
    pub particle_hole_symmetric: bool,
    /// FNV-1a hash of the coin sequence that built the operator.
    pub sequence_hash: String,
}

/// Branch-map `i log(lambda)` of a unit-modulus eigenvalue into `(-pi, pi]`.
///
/// Eigenvalues on the negative real axis belong at `+pi`; rounding can put
/// their argument a hair below `pi`, so the seam is folded with a small
/// tolerance to keep them from flapping between the branch ends.
fn quasi_energy_of(lambda: Complex64) -> f64 {
    let eps = -lambda.arg();
    if eps <= -PI + 1e-12 {
        eps + 2.0 * PI
    } else {
        eps
    }
}

fn smallest_positive(sorted: &[f64]) -> Option<f64> {
    sorted.iter().copied().find(|&e| e > GAP_ZERO_TOL)
}

fn is_symmetric_spectrum(sorted: &[f64], tol: f64) -> bool {
    // partner distances measured on the circle, so eps ~ pi pairs with
    // itself across the branch seam
    sorted.iter().all(|&e| {
        sorted
            .iter()
            .any(|&other| circular_distance(other, -e) <= tol)
    })
}

/// Full eigen-decomposition of a unitary operator into a spectrum report.
///
/// Rejects inputs whose unitarity deviation exceeds [`UNITARITY_TOL`].
pub fn quasi_energies(
    u: &Array2<Complex64>,
    dos_bins: usize,
    sequence_hash: String,
) -> Result<SpectrumReport> {
    let deviation = unitarity_deviation(u);
    if deviation > UNITARITY_TOL {
        return Err(Error::NotUnitary {
            deviation,
            tolerance: UNITARITY_TOL,
        });
    }
    let eigenvalues = u
        .eigvals()
        .map_err(|e| Error::EigFailure(e.to_string()))?;
    let max_modulus_deviation = eigenvalues
        .iter()
        .map(|l| (l.norm() - 1.0).abs())
        .fold(0.0f64, f64::max);
    let mut quasi: Vec<f64> = eigenvalues.iter().map(|&l| quasi_energy_of(l)).collect();
    quasi.sort_by(|a, b| a.partial_cmp(b).expect("finite quasi-energies"));
    let gap = smallest_positive(&quasi);
    let dos = DosHistogram::new(&quasi, dos_bins);
    let particle_hole_symmetric = is_symmetric_spectrum(&quasi, 1e-9);
    Ok(SpectrumReport {
        n_sites: u.nrows() / 2,
        quasi_energies: quasi,
        gap,
        dos,
        max_modulus_deviation,
        particle_hole_symmetric,
        sequence_hash,
    })
}

/// Build the total operator of `seq` on `n_sites` and decompose it.
pub fn spectrum_of_sequence(
    seq: &CoinSequence,
    n_sites: usize,
    dos_bins: usize,
) -> Result<SpectrumReport> {
    let u = total_operator(seq, n_sites)?;
    quasi_energies(&u, dos_bins, sequence_hash(seq))
}

/// Spectral gap of every prefix product `U(t) = U_t ... U_1`, `t = 1..=T`.
pub fn gap_evolution(seq: &CoinSequence, n_sites: usize) -> Result<Vec<(usize, Option<f64>)>> {
    if n_sites < 3 || n_sites % 2 == 0 {
        return Err(Error::InvalidSiteCount(n_sites));
    }
    let dim = 2 * n_sites;
    let coins: Vec<_> = seq
        .iter()
        .map(coin_matrix)
        .collect::<Result<Vec<_>>>()?;
    // evolve all basis columns step by step, decomposing each prefix
    let mut columns: Vec<Vec<Complex64>> = (0..dim)
        .map(|c| {
            let mut v = vec![Complex64::ZERO; dim];
            v[c] = Complex64::ONE;
            v
        })
        .collect();
    let mut scratch = vec![Complex64::ZERO; dim];
    let mut out = Vec::with_capacity(seq.len());
    for (t, coin) in coins.iter().enumerate() {
        for col in columns.iter_mut() {
            walk::step_into(n_sites, col, coin, &mut scratch);
            std::mem::swap(col, &mut scratch);
        }
        let mut u = Array2::<Complex64>::zeros((dim, dim));
        for (c, col) in columns.iter().enumerate() {
            for (r, &v) in col.iter().enumerate() {
                u[[r, c]] = v;
            }
        }
        let eigenvalues = u
            .eigvals()
            .map_err(|e| Error::EigFailure(e.to_string()))?;
        let mut quasi: Vec<f64> = eigenvalues.iter().map(|&l| quasi_energy_of(l)).collect();
        quasi.sort_by(|a, b| a.partial_cmp(b).expect("finite quasi-energies"));
        out.push((t + 1, smallest_positive(&quasi)));
    }
    Ok(out)
}

/// Exact dispersion of a constant coin on the `N`-site ring: for each
/// `k = 2 pi m / N` the step operator reduces to the 2x2 block
/// `diag(exp(-ik), exp(ik)) * B`, diagonalized in closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dispersion {
    /// `k_m = 2 pi m / N`, `m = 0..N`.
    pub momenta: Vec<f64>,
    /// Quasi-energy band continuously connected to `eps(0) = 0`.
    pub band_lower: Vec<f64>,
    /// The complementary band.
    pub band_upper: Vec<f64>,
}

impl Dispersion {
    /// All `2N` branch-mapped quasi-energies, sorted ascending.
    pub fn all_quasi_energies(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self
            .band_lower
            .iter()
            .chain(self.band_upper.iter())
            .copied()
            .collect();
        all.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        all
    }
}

/// Eigenvalues of a 2x2 complex matrix via the quadratic formula.
fn eig2x2(m: [[Complex64; 2]; 2]) -> (Complex64, Complex64) {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = (tr * tr - 4.0 * det).sqrt();
    ((tr + disc) / 2.0, (tr - disc) / 2.0)
}

/// Dispersion relation of the constant coin `B(theta)` (theta-only form).
pub fn dispersion_constant_coin(theta: f64, n_sites: usize) -> Result<Dispersion> {
    dispersion_constant_params(&CoinParams::theta_only(theta)?, n_sites)
}

/// Dispersion relation for an arbitrary constant coin.
pub fn dispersion_constant_params(params: &CoinParams, n_sites: usize) -> Result<Dispersion> {
    if n_sites < 3 || n_sites % 2 == 0 {
        return Err(Error::InvalidSiteCount(n_sites));
    }
    let b = coin_matrix(params)?.0;
    let n = n_sites;
    let mut momenta = Vec::with_capacity(n);
    let mut band_lower: Vec<f64> = Vec::with_capacity(n);
    let mut band_upper: Vec<f64> = Vec::with_capacity(n);
    for m in 0..n {
        let k = 2.0 * PI * m as f64 / n as f64;
        let phase_r = Complex64::from_polar(1.0, -k);
        let phase_l = Complex64::from_polar(1.0, k);
        let block = [
            [phase_r * b[0][0], phase_r * b[0][1]],
            [phase_l * b[1][0], phase_l * b[1][1]],
        ];
        let (l1, l2) = eig2x2(block);
        let (e1, e2) = (quasi_energy_of(l1), quasi_energy_of(l2));
        // follow each band by extrapolating its local slope, so crossings
        // (massless coins) continue straight through instead of reflecting
        let (pred_lo, pred_hi) = match band_lower.len() {
            0 => {
                momenta.push(k);
                if e1.abs() <= e2.abs() {
                    band_lower.push(e1);
                    band_upper.push(e2);
                } else {
                    band_lower.push(e2);
                    band_upper.push(e1);
                }
                continue;
            }
            1 => (band_lower[0], band_upper[0]),
            len => (
                extrapolate(band_lower[len - 2], band_lower[len - 1]),
                extrapolate(band_upper[len - 2], band_upper[len - 1]),
            ),
        };
        let direct = circular_distance(e1, pred_lo) + circular_distance(e2, pred_hi);
        let swapped = circular_distance(e2, pred_lo) + circular_distance(e1, pred_hi);
        let (lo, hi) = if direct <= swapped { (e1, e2) } else { (e2, e1) };
        momenta.push(k);
        band_lower.push(lo);
        band_upper.push(hi);
    }
    Ok(Dispersion {
        momenta,
        band_lower,
        band_upper,
    })
}

fn circular_distance(a: f64, b: f64) -> f64 {
    wrap_to_pi(a - b).abs()
}

/// Next value of a band continued with its current slope, on the circle.
fn extrapolate(prev2: f64, prev1: f64) -> f64 {
    prev1 + wrap_to_pi(prev1 - prev2)
}

fn wrap_to_pi(d: f64) -> f64 {
    let mut d = d.rem_euclid(2.0 * PI);
    if d > PI {
        d -= 2.0 * PI;
    }
    d
}

/// Group velocities `v_g = d eps / d k` per band, by central differences on
/// the periodic momentum grid.
pub fn group_velocity(dispersion: &Dispersion) -> (Vec<f64>, Vec<f64>) {
    let n = dispersion.momenta.len();
    let dk = 2.0 * PI / n as f64;
    let diff = |band: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|m| {
                let next = band[(m + 1) % n];
                let prev = band[(m + n - 1) % n];
                wrap_to_pi(next - prev) / (2.0 * dk)
            })
            .collect()
    };
    (diff(&dispersion.band_lower), diff(&dispersion.band_upper))
}

/// Effective mass of the constant-coin walker,
/// `M = sqrt(2 (sec theta - 1) / cos theta)`.
///
/// Diverges as `theta -> pi/2`; the boundary itself returns infinity rather
/// than an error.
pub fn effective_mass(theta: f64) -> Result<f64> {
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&theta) {
        return Err(Error::AngleOutOfRange {
            name: "theta",
            value: theta,
            lo: 0.0,
            hi: std::f64::consts::FRAC_PI_2,
        });
    }
    if theta == std::f64::consts::FRAC_PI_2 {
        return Ok(f64::INFINITY);
    }
    let c = theta.cos();
    Ok((2.0 * (1.0 / c - 1.0) / c).sqrt())
}

/// Stable 64-bit FNV-1a hash of the coin sequence, hex-encoded.
pub fn sequence_hash(seq: &CoinSequence) -> String {
    const OFFSET: u64 = 0xcbf29ce484222325;
    const PRIME: u64 = 0x100000001b3;
    let mut h = OFFSET;
    let mut mix = |bytes: [u8; 8]| {
        for b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(PRIME);
        }
    };
    for p in seq.iter() {
        mix(p.xi.to_le_bytes());
        mix(p.theta.to_le_bytes());
        mix(p.zeta.to_le_bytes());
    }
    format!("{h:016x}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::WalkerState;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn sigma_z_total_operator_is_signed_shift() {
        let seq = CoinSequence::theta_only(&[0.0]).unwrap();
        let u = total_operator(&seq, 3).unwrap();
        // R block: cyclic right shift with +1 entries
        for col in 0..3 {
            let row = (col + 1) % 3;
            assert!((u[[row, col]] - Complex64::ONE).norm() < 1e-15);
        }
        // L block: cyclic left shift with -1 entries
        for col in 0..3 {
            let row = 3 + (col + 2) % 3;
            assert!((u[[row, 3 + col]] + Complex64::ONE).norm() < 1e-15);
        }
        assert!(unitarity_deviation(&u) < 1e-14);
    }

    #[test]
    fn total_operator_matches_evolve() {
        let seq = CoinSequence::theta_only(&[0.3, 1.0, FRAC_PI_4]).unwrap();
        let n = 7;
        let u = total_operator(&seq, n).unwrap();
        let initial = WalkerState::symmetric_initial(n).unwrap();
        let states = walk::evolve(&initial, &seq).unwrap();
        let last = states.last().unwrap();
        for (row, expected) in last.amplitudes().iter().enumerate() {
            let got: Complex64 = (0..2 * n)
                .map(|col| u[[row, col]] * initial.amplitudes()[col])
                .sum();
            assert!((got - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn sigma_x_spectrum_is_flat_and_gapped() {
        let seq = CoinSequence::theta_only(&[FRAC_PI_2]).unwrap();
        let report = spectrum_of_sequence(&seq, 11, 16).unwrap();
        for &e in &report.quasi_energies {
            assert!(
                e.abs() < 1e-10 || (e - std::f64::consts::PI).abs() < 1e-10,
                "eps={e}"
            );
        }
        let gap = report.gap.unwrap();
        assert!((gap - std::f64::consts::PI).abs() < 1e-10);
        assert!(report.max_modulus_deviation < 1e-10);
    }

    #[test]
    fn sigma_z_spectrum_is_gapless_linear() {
        // the R block contributes even multiples of pi/N, the sign-flipped
        // L block the odd multiples: the union is gapless with spacing pi/N
        let seq = CoinSequence::theta_only(&[0.0]).unwrap();
        let report = spectrum_of_sequence(&seq, 101, DEFAULT_DOS_BINS).unwrap();
        let gap = report.gap.unwrap();
        let expected = PI / 101.0;
        assert!((gap - expected).abs() < 1e-9, "gap={gap}, expected={expected}");

        // along a single linear band the level spacing is the momentum
        // spacing 2 pi / N
        let d = dispersion_constant_coin(0.0, 101).unwrap();
        let spacing = (d.band_lower[1] - d.band_lower[0]).abs();
        assert!((spacing - 2.0 * PI / 101.0).abs() < 1e-12, "spacing={spacing}");
        let band_min_positive = d
            .band_lower
            .iter()
            .copied()
            .filter(|&e| e > GAP_ZERO_TOL)
            .fold(f64::INFINITY, f64::min);
        assert!((band_min_positive - 2.0 * PI / 101.0).abs() < 1e-9);
    }

    #[test]
    fn spectrum_length_and_dos_counts() {
        let seq = CoinSequence::theta_only(&[0.4, 0.9]).unwrap();
        let report = spectrum_of_sequence(&seq, 9, 16).unwrap();
        assert_eq!(report.quasi_energies.len(), 18);
        assert_eq!(report.dos.counts.iter().sum::<usize>(), 18);
        assert!(report.particle_hole_symmetric);
    }

    #[test]
    fn non_unitary_input_is_rejected() {
        let mut u = Array2::<Complex64>::eye(4);
        u[[0, 0]] = Complex64::new(1.5, 0.0);
        assert!(quasi_energies(&u, 8, String::new()).is_err());
    }

    #[test]
    fn dispersion_matches_dense_spectrum() {
        let theta = FRAC_PI_4;
        let n = 21;
        let dispersion = dispersion_constant_coin(theta, n).unwrap();
        let block_eps = dispersion.all_quasi_energies();
        let seq = CoinSequence::theta_only(&[theta]).unwrap();
        let dense = spectrum_of_sequence(&seq, n, 16).unwrap();
        assert_eq!(block_eps.len(), dense.quasi_energies.len());
        for (a, b) in block_eps.iter().zip(&dense.quasi_energies) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn group_velocity_limits() {
        // massless coin: |v_g| = 1 everywhere
        let d = dispersion_constant_coin(0.0, 51).unwrap();
        let (lo, hi) = group_velocity(&d);
        for v in lo.iter().chain(&hi) {
            assert!((v.abs() - 1.0).abs() < 1e-9, "v={v}");
        }
        // flat coin: v_g = 0 everywhere
        let d = dispersion_constant_coin(FRAC_PI_2, 51).unwrap();
        let (lo, hi) = group_velocity(&d);
        for v in lo.iter().chain(&hi) {
            assert!(v.abs() < 1e-9, "v={v}");
        }
        // Hadamard: max speed 1/sqrt(2)
        let d = dispersion_constant_coin(FRAC_PI_4, 513).unwrap();
        let (lo, _) = group_velocity(&d);
        let vmax = lo.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!((vmax - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-3, "vmax={vmax}");
    }

    #[test]
    fn effective_mass_values() {
        assert_eq!(effective_mass(0.0).unwrap(), 0.0);
        let m = effective_mass(FRAC_PI_4).unwrap();
        assert!((m - (4.0 - 2.0 * 2.0f64.sqrt()).sqrt()).abs() < 1e-14);
        assert!((m - 1.0824).abs() < 1e-4);
        assert!(effective_mass(FRAC_PI_2).unwrap().is_infinite());
        assert!(effective_mass(-0.1).is_err());
        // strictly increasing toward the boundary
        let mut prev = 0.0;
        for i in 1..10 {
            let theta = FRAC_PI_2 * i as f64 / 10.0;
            let m = effective_mass(theta).unwrap();
            assert!(m > prev);
            prev = m;
        }
    }

    #[test]
    fn hash_is_stable_and_input_sensitive() {
        let a = CoinSequence::theta_only(&[0.1, 0.2]).unwrap();
        let b = CoinSequence::theta_only(&[0.1, 0.2]).unwrap();
        let c = CoinSequence::theta_only(&[0.1, 0.3]).unwrap();
        assert_eq!(sequence_hash(&a), sequence_hash(&b));
        assert_ne!(sequence_hash(&a), sequence_hash(&c));
    }
}
