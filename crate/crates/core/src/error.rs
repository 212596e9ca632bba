use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension {0}: the Fock cutoff must be at least 2")]
    InvalidDimension(usize),

    #[error("Fock level {n} is out of range for dimension {dim}")]
    OutOfRange { n: usize, dim: usize },

    /// The state does not fit in the requested Fock space.
    #[error("truncation: {what} leaves mass {tail:.3e} outside dim {dim}; use dim >= {suggested}")]
    Truncation {
        what: String,
        dim: usize,
        tail: f64,
        suggested: usize,
    },

    #[error("degenerate cat state: g~({q}) = {value:.3e} vanishes for this amplitude")]
    DegenerateCat { q: i64, value: f64 },

    #[error("validation: {0}")]
    Validation(String),

    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),

    #[error("mixture weights invalid: {0}")]
    Weights(String),

    #[error("unsupported ordering s = {0}: only s <= 0 can be sampled on a grid")]
    UnsupportedOrdering(f64),

    #[error("grid captures mass {0:.6}, below 0.999; enlarge the extent")]
    MassDeficit(f64),

    #[error("s = {0} is outside the convergent range of the s-ordered integrals (s < 1)")]
    Divergence(f64),

    #[error("degenerate input: purity {0:.3e} is zero")]
    ZeroPurity(f64),

    #[error("need {needed} moments, have {have}")]
    InsufficientMoments { needed: usize, have: usize },

    #[error("moment order {l_max} too large for dim {dim} (limit dim/4)")]
    MomentOrder { l_max: usize, dim: usize },

    #[error("undefined: {0}")]
    Undefined(String),
}

pub type Result<T> = std::result::Result<T, Error>;
