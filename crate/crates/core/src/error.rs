use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("order-{order} SBP operator needs at least {min} points, got {n}")]
    TooFewPoints { order: usize, n: usize, min: usize },

    #[error("{what}: expected length {expected}, got {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("dissipation coefficient must be non-negative, got {0}")]
    NegativeDissipation(f64),

    #[error("SAT penalty factor theta = {0} violates the stability bound theta >= 1/2")]
    PenaltyTooWeak(f64),

    #[error("non-finite {what} at node ({i}, {j})")]
    NonFinite {
        what: &'static str,
        i: usize,
        j: usize,
    },

    #[error("CFL number must lie in (0, 1], got {0}")]
    InvalidCfl(f64),

    #[error("invalid time interval: {0}")]
    InvalidTime(String),

    #[error("velocity vanishes on the whole grid; a fixed time step is required")]
    ZeroVelocity,

    #[error("boundary table has no data at t = {t} (covers [{start}, {end}])")]
    TimeOutOfRange { t: f64, start: f64, end: f64 },

    #[error("relative error undefined: exact field is identically zero")]
    ZeroReference,

    #[error("solution became non-finite at step {step} (t = {time})")]
    Unstable { step: usize, time: f64 },

    #[error("{0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
