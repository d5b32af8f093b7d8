//! Physical boundary data.
//!
//! Signals are given in the frame of the boundary they act on. At the left
//! wall the conditions are
//!
//! * `EvenGiven`: `u = (-1)^p alpha`, `u_xx = (-1)^p beta`
//! * `OddGiven`: `u_x = (-1)^p alpha`, `u_xxx = (-1)^p beta`
//!
//! The right wall uses the mirror image `x -> -x`, so odd derivatives there
//! are taken along the inward normal.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;

/// A real, scalar function of time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "type", deny_unknown_fields)]
pub enum Signal {
    Constant { value: f64 },
    /// `mean + amplitude * sin(omega t + phase)`.
    Harmonic { mean: f64, amplitude: f64, omega: f64, phase: f64 },
    /// Piecewise-linear interpolation of `values` sampled every `dt` from
    /// `t0`, held constant outside the sampled range.
    Sampled { t0: f64, dt: f64, values: Vec<f64> },
}

impl Default for Signal {
    fn default() -> Self {
        Signal::zero()
    }
}

impl Signal {
    pub fn zero() -> Self {
        Signal::Constant { value: 0.0 }
    }

    pub fn constant(value: f64) -> Self {
        Signal::Constant { value }
    }

    pub fn at(&self, t: f64) -> f64 {
        match self {
            Signal::Constant { value } => *value,
            Signal::Harmonic {
                mean,
                amplitude,
                omega,
                phase,
            } => mean + amplitude * (omega * t + phase).sin(),
            Signal::Sampled { t0, dt, values } => {
                let Some(&last) = values.last() else {
                    return 0.0;
                };
                let s = (t - t0) / dt;
                if s <= 0.0 {
                    return values[0];
                }
                let i = s.floor() as usize;
                if i + 1 >= values.len() {
                    return last;
                }
                let w = s - i as f64;
                values[i] * (1.0 - w) + values[i + 1] * w
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Signal::Constant { value } => *value == 0.0,
            Signal::Harmonic { mean, amplitude, .. } => *mean == 0.0 && *amplitude == 0.0,
            Signal::Sampled { values, .. } => values.iter().all(|v| *v == 0.0),
        }
    }

    /// Largest centred second difference `|f''|` over `[t0, t1]` sampled at
    /// spacing `step`.
    pub fn max_second_derivative(&self, t0: f64, t1: f64, step: f64) -> f64 {
        let n = ((t1 - t0) / step).ceil().max(0.0) as usize;
        (0..=n)
            .map(|i| {
                let t = t0 + i as f64 * step;
                ((self.at(t + step) - 2.0 * self.at(t) + self.at(t - step)) / (step * step)).abs()
            })
            .fold(0.0, f64::max)
    }

    fn validate(&self, name: &'static str) -> Result<()> {
        let ok = match self {
            Signal::Constant { value } => value.is_finite(),
            Signal::Harmonic {
                mean,
                amplitude,
                omega,
                phase,
            } => [mean, amplitude, omega, phase].iter().all(|v| v.is_finite()),
            Signal::Sampled { t0, dt, values } => {
                t0.is_finite() && *dt > 0.0 && !values.is_empty() && values.iter().all(|v| v.is_finite())
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter {
                name,
                reason: format!("malformed signal {self:?}"),
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ForcingKind {
    Periodic,
    EvenGiven,
    OddGiven,
}

impl ForcingKind {
    pub fn name(self) -> &'static str {
        match self {
            ForcingKind::Periodic => "periodic",
            ForcingKind::EvenGiven => "even-given",
            ForcingKind::OddGiven => "odd-given",
        }
    }
}

/// The two families of boundary stencils. `Upper` goes with even
/// derivatives given at the wall, `Lower` with odd derivatives given.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignChoice {
    Upper,
    Lower,
}

impl SignChoice {
    /// `+1` for the upper alternative of each `±`, `-1` for the lower.
    pub fn sigma(self) -> f64 {
        match self {
            SignChoice::Upper => 1.0,
            SignChoice::Lower => -1.0,
        }
    }

    pub fn kind(self) -> ForcingKind {
        match self {
            SignChoice::Upper => ForcingKind::EvenGiven,
            SignChoice::Lower => ForcingKind::OddGiven,
        }
    }

    pub fn for_kind(kind: ForcingKind) -> Option<Self> {
        match kind {
            ForcingKind::Periodic => None,
            ForcingKind::EvenGiven => Some(SignChoice::Upper),
            ForcingKind::OddGiven => Some(SignChoice::Lower),
        }
    }
}

/// Values of `(alpha, beta)` at one wall and one instant.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WallValues {
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryForcing {
    pub kind: ForcingKind,
    pub alpha: Signal,
    pub beta: Signal,
    /// Right-wall signals, in the mirrored frame. Homogeneous by default.
    #[serde(default)]
    pub right_alpha: Signal,
    #[serde(default)]
    pub right_beta: Signal,
    /// `(-1)^p`.
    pub parity_factor: f64,
}

impl BoundaryForcing {
    pub fn periodic() -> Self {
        BoundaryForcing {
            kind: ForcingKind::Periodic,
            alpha: Signal::zero(),
            beta: Signal::zero(),
            right_alpha: Signal::zero(),
            right_beta: Signal::zero(),
            parity_factor: 1.0,
        }
    }

    /// Walls of the given kind with homogeneous data on both sides.
    pub fn homogeneous(kind: ForcingKind, params: &ModelParams) -> Self {
        BoundaryForcing {
            kind,
            parity_factor: if kind == ForcingKind::Periodic { 1.0 } else { params.parity() },
            ..Self::periodic()
        }
    }

    /// Left-wall forcing `(alpha, beta)`, homogeneous right wall.
    pub fn left(kind: ForcingKind, alpha: Signal, beta: Signal, params: &ModelParams) -> Self {
        BoundaryForcing {
            alpha,
            beta,
            ..Self::homogeneous(kind, params)
        }
    }

    pub fn with_right(mut self, alpha: Signal, beta: Signal) -> Self {
        self.right_alpha = alpha;
        self.right_beta = beta;
        self
    }

    pub fn is_periodic(&self) -> bool {
        self.kind == ForcingKind::Periodic
    }

    pub fn sign(&self) -> Option<SignChoice> {
        SignChoice::for_kind(self.kind)
    }

    pub fn left_values(&self, t: f64) -> WallValues {
        WallValues {
            alpha: self.alpha.at(t),
            beta: self.beta.at(t),
        }
    }

    pub fn right_values(&self, t: f64) -> WallValues {
        WallValues {
            alpha: self.right_alpha.at(t),
            beta: self.right_beta.at(t),
        }
    }

    pub fn validate(&self, params: &ModelParams) -> Result<()> {
        if self.is_periodic() {
            let carries_signal = [&self.alpha, &self.beta, &self.right_alpha, &self.right_beta]
                .iter()
                .any(|s| !s.is_zero());
            if carries_signal {
                return Err(Error::InvalidParameter {
                    name: "forcing",
                    reason: "periodic forcing carries no boundary signals".into(),
                });
            }
            return Ok(());
        }
        if self.parity_factor != params.parity() {
            return Err(Error::InvalidParameter {
                name: "parity_factor",
                reason: format!("{} != (-1)^p = {}", self.parity_factor, params.parity()),
            });
        }
        self.alpha.validate("alpha")?;
        self.beta.validate("beta")?;
        self.right_alpha.validate("right_alpha")?;
        self.right_beta.validate("right_beta")
    }

    /// Checks that the wall kind agrees with a stencil family.
    pub fn check_sign(&self, sign: SignChoice) -> Result<()> {
        match self.sign() {
            None => Err(Error::ForcingKind {
                found: self.kind.name(),
                reason: "boundary stencils need EvenGiven or OddGiven walls",
            }),
            Some(s) if s != sign => Err(Error::ForcingKind {
                found: self.kind.name(),
                reason: "wall kind does not match the requested sign choice",
            }),
            Some(_) => Ok(()),
        }
    }

    /// The largest `|alpha''|` or `|beta''|` on either wall over `[t0, t1]`.
    pub fn max_second_derivative(&self, t0: f64, t1: f64, step: f64) -> f64 {
        [&self.alpha, &self.beta, &self.right_alpha, &self.right_beta]
            .iter()
            .map(|s| s.max_second_derivative(t0, t1, step))
            .fold(0.0, f64::max)
    }
}
