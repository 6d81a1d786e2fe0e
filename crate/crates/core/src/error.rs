use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "delocalized mode is resonant with the atoms (delta' = {detuning}); the dispersive picture does not apply"
    )]
    Resonance { detuning: f64 },

    #[error("dispersive conditions not satisfied; effective dynamics is not a valid prediction")]
    DispersiveInvalid,

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("density matrix has eigenvalue {eigenvalue:e} below the positivity tolerance")]
    NotPositive { eigenvalue: f64 },

    #[error("density matrix is not in X form (largest off-pattern entry {magnitude:e})")]
    NotXForm { magnitude: f64 },

    #[error("initial thermal ensemble is empty after truncation")]
    EmptyEnsemble,

    #[error("retained thermal mass {retained} is below the required minimum {minimum}")]
    TruncationMass { retained: f64, minimum: f64 },

    #[error("time grid: {0}")]
    TimeGrid(String),

    #[error("integrator step {step:e} underflowed")]
    StepUnderflow { step: f64 },

    #[error("trace drifted to {trace} at gt = {time}")]
    TraceDrift { trace: f64, time: f64 },

    #[error("step-halving changed the reduced state by {difference:e} (> {tolerance:e})")]
    NotConverged { difference: f64, tolerance: f64 },

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("unknown figure preset `{0}`")]
    UnknownPreset(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
