use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("index {index} has no neighbours on a bounded lattice of {len} elements")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("grid is not element aligned: {0}")]
    Misaligned(String),

    #[error("operation requires a periodic grid")]
    NotPeriodic,

    #[error("operation requires a bounded grid")]
    NotBounded,

    #[error("forcing kind {found} is not valid here: {reason}")]
    ForcingKind { found: &'static str, reason: &'static str },

    #[error("time step {dt} exceeds the stability limit {limit}")]
    UnstableTimeStep { dt: f64, limit: f64 },

    #[error("non-finite values at t = {t}")]
    Diverged { t: f64 },

    #[error("wavenumber {k} is not resolvable on this grid: {reason}")]
    Unresolvable { k: f64, reason: String },

    #[error("mode amplitude {amplitude:e} left the linear regime (seed {seed:e})")]
    NonlinearRegime { amplitude: f64, seed: f64 },
}

impl Error {
    /// True for failures caused by the numerics rather than by the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Diverged { .. } | Error::NonlinearRegime { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
