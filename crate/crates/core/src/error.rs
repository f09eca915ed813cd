use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("adaptive step {step:e} fell below the underflow limit {limit:e} at t = {t}")]
    StepUnderflow { t: f64, step: f64, limit: f64 },

    #[error("state became non-finite at t = {t}")]
    NonFiniteState { t: f64 },

    #[error("time {t} is outside the trajectory span [{start}, {end}]")]
    OutOfRange { t: f64, start: f64, end: f64 },

    #[error("the rotating frame requires a constant carrier; chirped drives are not supported")]
    ChirpNotSupported,

    #[error("frame transform {from} -> {to} is not an exact phase map")]
    UnsupportedTransform { from: &'static str, to: &'static str },

    #[error("resonant denominator `{which}` = {value:e} in the naive perturbation series")]
    ResonantDenominator { which: &'static str, value: f64 },

    #[error("relaxation rates must be positive for a unique fixed point (gamma1 = {gamma1}, gamma2 = {gamma2})")]
    ZeroDissipation { gamma1: f64, gamma2: f64 },

    #[error("pulse amplitude must be positive, got {0}")]
    NonPositiveAmplitude(f64),

    #[error("shaped-amplitude design needs a blue-shifted carrier (delta > 0), got delta = {0}")]
    RedShiftedDetuning(f64),

    #[error("pulse spacing {spacing} must exceed 6 sigma0 = {min}")]
    OverlappingPulses { spacing: f64, min: f64 },

    #[error("averaged equations need a common carrier across the pulse train")]
    MixedCarrier,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        field,
        reason: reason.into(),
    }
}
