use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("quadrature grid reaches k = {k_min:.6e} <= 0; wavepacket is not fully right-moving")]
    GridNotRightMoving { k_min: f64 },

    #[error("singular scattering system at k = {k:.6e} (estimated condition number {condition:.3e})")]
    SingularSystem { k: f64, condition: f64 },

    #[error("size mismatch: {what} (expected {expected}, got {got})")]
    SizeMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("no half-height crossing of the central fringe inside the scanned range")]
    NoCrossing,

    #[error("ill-conditioned noise estimate at detuning {delta:.6e}: |dP/d delta| = {slope:.3e}")]
    IllConditioned { delta: f64, slope: f64 },

    #[error("detuning {delta:.6e} outside scan range [{min:.6e}, {max:.6e}]")]
    OutOfRange { delta: f64, min: f64, max: f64 },

    #[error("unknown operator `{0}`")]
    UnknownOperator(String),

    #[error("collision sector violated: requires x1 < x2, got x1 = {x1}, x2 = {x2}")]
    SectorViolation { x1: f64, x2: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
