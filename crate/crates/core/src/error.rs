use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("squeeze angle {0} is not supported (only 0 and pi/2)")]
    UnsupportedSqueezeAngle(f64),
    #[error("squeezing parameter must be finite and non-negative, got {0}")]
    NegativeSqueezing(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("trajectory {trajectory:?} diverged at z = {z}")]
    Divergence { trajectory: Option<u64>, z: f64 },
    #[error("non-finite phase-space point rejected by accumulator")]
    NonFinite,
    #[error("need at least {needed} samples, have {have}")]
    InsufficientCount { needed: u64, have: u64 },
    #[error("need at least 10 batches of 2 or more samples each")]
    InsufficientBatches,
    #[error("same-frequency variance {0} too small to infer from")]
    DegenerateDenominator(f64),
    #[error("Fock cutoff too small: retained norm {norm}")]
    CutoffTooSmall { norm: f64 },
    #[error("Fock evolution norm drifted by {0}")]
    NormDrift(f64),
    #[error("index out of range")]
    IndexOutOfRange,
}
