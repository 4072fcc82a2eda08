use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("kernel evaluated at dt = {dt} outside the tabulated range [0, {max}]")]
    OutOfTable { dt: f64, max: f64 },

    #[error("non-finite value at node {node} (t = {t})")]
    NonFinite { node: usize, t: f64 },

    #[error("solver unstable at node {node} (t = {t}): |G| = {modulus}")]
    Unstable { node: usize, t: f64, modulus: f64 },

    #[error("oracle step too coarse: dt * max rate = {0:.4} (must stay below 0.1)")]
    StepTooCoarse(f64),

    #[error("oracle norm drifted by {drift:.3e} at node {node}")]
    NormDrift { node: usize, drift: f64 },

    #[error("time grids differ: {0}")]
    GridMismatch(String),

    #[error("initial state is not normalized (norm² = {0})")]
    NotNormalized(f64),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn ensure_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite, got {value}")))
    }
}
