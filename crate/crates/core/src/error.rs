use thiserror::Error;

/// Errors raised by the field, orbit, stability and averaging routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("polarization parameter must satisfy |delta| <= 1, got {0}")]
    InvalidPolarization(f64),

    #[error("operation requires a {expected} field model, got {found}")]
    WrongModelKind {
        expected: &'static str,
        found: &'static str,
    },

    #[error("initial state violates the mass-shell constraint: |H + 1/2| = {residual:e} > {limit:e}")]
    InitialConstraintViolated { residual: f64, limit: f64 },

    #[error("initial tangent is not timelike (g(v, v) = {norm:e})")]
    NonTimelikeInitial { norm: f64 },

    #[error("adaptive step size underflow at parameter {at} (h = {step:e})")]
    StepFailure { at: f64, step: f64 },

    #[error("world line was produced by a different field model or momenta")]
    ModelMismatch,

    #[error("no reduced Jacobi equation for the orbit class x = (n + 1/2) pi / omega")]
    UnsupportedOrbitClass,

    #[error("monodromy is parabolic (|phi| = 1 within {tol:e}, phi = {phi})")]
    DegenerateMonodromy { phi: f64, tol: f64 },

    #[error("Landau decomposition identity violated at T = {at}: |J - X - xi| = {residual:e}")]
    DecompositionIdentityViolated { at: f64, residual: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
