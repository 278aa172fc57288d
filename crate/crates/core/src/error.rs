use thiserror::Error;

/// Errors produced by walk construction, metrics, and spectral routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("angle {name}={value} out of range [{lo}, {hi}]")]
    AngleOutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("position space must have an odd number of sites >= 3, got {0}")]
    InvalidSiteCount(usize),

    #[error("coin sequence must contain at least one step")]
    EmptySequence,

    #[error("boundary-free evolution of {steps} steps needs at least {needed} sites, got {n_sites}")]
    BoundaryTooSmall {
        steps: usize,
        needed: usize,
        n_sites: usize,
    },

    #[error("probability vector has negative entry {value} at index {index}")]
    NegativeProbability { index: usize, value: f64 },

    #[error("sequence lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("reference sequence sums to zero; distance undefined")]
    ZeroReferenceNorm,

    #[error("matrix deviates from unitarity by {deviation:.3e} (tolerance {tolerance:.3e})")]
    NotUnitary { deviation: f64, tolerance: f64 },

    #[error("eigenvalue decomposition failed: {0}")]
    EigFailure(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
