//! Reference solvers for `u_t = r u - (1 + d_xx)^2 u - u^3`.
//!
//! [`spectral`] integrates periodic domains with fourth-order exponential
//! time differencing. [`bounded`] handles walls with second-order finite
//! differences and ghost points.

mod banded;
pub mod bounded;
pub mod spectral;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bounded::{step_bounded, BoundedStepper};
pub use spectral::{measure_growth_rate, step_spectral, SpectralStepper};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    SpectralEtd,
    BoundedImex,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_end: f64,
    pub dealias: bool,
    pub scheme: Scheme,
    /// Bounded runs require `dt <= c_stab * dx^2`.
    pub c_stab: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dt: 0.05,
            t_end: 10.0,
            dealias: true,
            scheme: Scheme::SpectralEtd,
            c_stab: DEFAULT_C_STAB,
        }
    }
}

pub const DEFAULT_C_STAB: f64 = 1.0;

impl SolverConfig {
    pub fn validate(&self, dx: f64) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: format!("{} must be positive", self.dt),
            });
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "t_end",
                reason: format!("{} must be non-negative", self.t_end),
            });
        }
        if self.scheme == Scheme::BoundedImex {
            let limit = self.c_stab * dx * dx;
            if self.dt > limit {
                return Err(Error::UnstableTimeStep { dt: self.dt, limit });
            }
        }
        Ok(())
    }
}

/// Per-step diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepStats {
    /// Largest imaginary part left after the inverse transform.
    pub imag_leakage: f64,
}
