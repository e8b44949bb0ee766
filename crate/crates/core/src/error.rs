use thiserror::Error;

/// Errors produced by the solver, classifier and witness machinery.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("time {t} lies outside the horizon [0, {horizon}]")]
    OutOfHorizon { t: f64, horizon: f64 },

    #[error("adaptive quadrature failed to reach tolerance {tolerance} within {budget} nodes")]
    QuadratureFailure { tolerance: f64, budget: usize },

    #[error("coefficient does not vanish at t = {t}: |c| = {value} exceeds tolerance {tolerance}")]
    NonVanishing { t: f64, value: f64, tolerance: f64 },

    #[error("order estimation is ill-conditioned: {0}")]
    IllConditioned(String),

    #[error("log-magnitude {logmag} exceeds the overflow guard; value not representable in linear domain")]
    OverflowGuard { logmag: f64 },

    #[error(
        "fixed-step integration too coarse: halving the step changed the result by {discrepancy}"
    )]
    StepsTooCoarse { discrepancy: f64 },

    #[error("not enough data: {0}")]
    InsufficientData(String),

    #[error("structure cannot be classified: {0}")]
    Unclassifiable(String),

    #[error("malformed structure: {0}")]
    MalformedStructure(String),

    #[error("degenerate point is not in the supercritical set (p <= 2q + 1)")]
    NotInK,

    #[error("ladder parameter is outside the monotonicity window: {0}")]
    BadLadder(String),

    #[error("invalid specification: {0}")]
    InvalidSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
