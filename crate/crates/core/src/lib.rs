//! Simulation, optimization, and diagnostics of 1D discrete-time quantum
//! walks with time-dependent coin operators.
//!
//! The crate is organized around five pieces:
//!
//! - [`walk`]: walker states and exact unitary evolution on a cyclic ring;
//! - [`metrics`]: entropies, spread objectives, variance, entanglement,
//!   component overlaps and survival probabilities;
//! - [`optimize`]: multi-start local search for coin sequences that maximize
//!   spatial spread over the whole trajectory (or just the final step);
//! - [`spectral`]: total evolution operators, quasi-energy spectra, density
//!   of states, dispersion relations and group velocities;
//! - [`reference`]: closed-form short-walk ground truth used as test oracles
//!   and for feasibility scans.

pub mod error;
pub mod io;
pub mod metrics;
pub mod optimize;
pub mod reference;
pub mod spectral;
pub mod walk;

pub use error::{Error, Result};
pub use walk::{CoinParams, CoinSequence, WalkerState};
