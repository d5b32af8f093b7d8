use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Uniform real samples of `u(x, t)`.
///
/// Periodic grids hold `n` samples with `u[0]` at `x0`, wrapping at
/// `x0 + n dx`. Bounded grids include both end points, so an element-aligned
/// bounded grid has `n_elements * m_samples + 1` samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldGrid {
    pub t: f64,
    pub x0: f64,
    pub dx: f64,
    pub u: Vec<f64>,
    pub periodic: bool,
}

impl FieldGrid {
    /// Zero field on the element-aligned layout of `params`, left edge at `-h/2`.
    pub fn zeros(params: &ModelParams, periodic: bool) -> Self {
        let n = params.n_elements * params.m_samples + usize::from(!periodic);
        FieldGrid {
            t: 0.0,
            x0: params.left_edge(),
            dx: params.dx(),
            u: vec![0.0; n],
            periodic,
        }
    }

    /// Samples `f` on the element-aligned layout of `params`.
    pub fn from_fn(params: &ModelParams, periodic: bool, f: impl Fn(f64) -> f64) -> Self {
        let mut grid = Self::zeros(params, periodic);
        for i in 0..grid.u.len() {
            grid.u[i] = f(grid.x(i));
        }
        grid
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// Number of sample intervals covered by the grid.
    pub fn intervals(&self) -> usize {
        if self.periodic {
            self.u.len()
        } else {
            self.u.len().saturating_sub(1)
        }
    }

    pub fn length(&self) -> f64 {
        self.intervals() as f64 * self.dx
    }

    pub fn sup_norm(&self) -> f64 {
        self.u.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Checks that the grid is the element-aligned layout for `params`.
    pub fn check_aligned(&self, params: &ModelParams) -> Result<()> {
        let intervals = params.n_elements * params.m_samples;
        if self.intervals() != intervals {
            return Err(Error::Misaligned(format!(
                "{} sample intervals, expected {} x {}",
                self.intervals(),
                params.n_elements,
                params.m_samples
            )));
        }
        if (self.dx - params.dx()).abs() > 1e-12 * params.dx() {
            return Err(Error::Misaligned(format!("dx = {}, expected h/m = {}", self.dx, params.dx())));
        }
        Ok(())
    }
}

/// Complex roll amplitudes on the element lattice at time `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeState {
    pub t: f64,
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
}

impl AmplitudeState {
    pub fn zeros(n: usize) -> Self {
        AmplitudeState {
            t: 0.0,
            a: vec![Complex64::new(0.0, 0.0); n],
            b: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    /// State of a real field: `b_j = conj(a_j)`.
    pub fn real_sector(a: Vec<Complex64>) -> Self {
        let b = a.iter().map(|z| z.conj()).collect();
        AmplitudeState { t: 0.0, a, b }
    }

    pub fn new(a: Vec<Complex64>, b: Vec<Complex64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::SizeMismatch {
                expected: a.len(),
                found: b.len(),
            });
        }
        Ok(AmplitudeState { t: 0.0, a, b })
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// `A = ||a|| + ||b||` (Euclidean norms), the size measure used to grade
    /// truncation orders.
    pub fn size(&self) -> f64 {
        let norm = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        norm(&self.a) + norm(&self.b)
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().chain(&self.b).fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.a.iter().chain(&self.b).all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Cyclic shift by `k` elements towards higher indices.
    pub fn shifted(&self, k: usize) -> Self {
        let mut out = self.clone();
        out.a.rotate_right(k % self.len().max(1));
        out.b.rotate_right(k % self.len().max(1));
        out
    }

    /// Reflection `x -> -x` about the domain centre: element `j` maps to
    /// `N - 1 - j` and `exp(ix)` maps to `exp(-ix)`, so `a` and `b` swap.
    pub fn mirrored(&self) -> Self {
        let mut a = self.b.clone();
        let mut b = self.a.clone();
        a.reverse();
        b.reverse();
        AmplitudeState { t: self.t, a, b }
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if self.a.len() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                found: self.a.len(),
            });
        }
        if self.b.len() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                found: self.b.len(),
            });
        }
        Ok(())
    }
}
