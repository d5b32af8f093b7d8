//! Pseudospectral integration on periodic grids.
//!
//! The linear part `r - (1 - k^2)^2` is propagated exactly on each Fourier
//! mode and the cubic term is evaluated in physical space, so the scheme is
//! ETDRK4 (Cox-Matthews). The `phi`-function coefficients are computed by
//! contour averaging, which stays accurate where `L dt` is near zero.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::StepStats;
use crate::error::{Error, Result};
use crate::field::FieldGrid;
use crate::params::ModelParams;

const CONTOUR_POINTS: usize = 64;

pub struct SpectralStepper {
    n: usize,
    dt: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    wavenumbers: Vec<f64>,
    mask: Vec<f64>,
    e: Vec<f64>,
    e2: Vec<f64>,
    q: Vec<f64>,
    f1: Vec<f64>,
    f2: Vec<f64>,
    f3: Vec<f64>,
    scratch: Vec<Complex64>,
}

/// Growth rate of `exp(ikx)` under the linearised equation.
pub fn linear_symbol(r: f64, k: f64) -> f64 {
    let s = 1.0 - k * k;
    r - s * s
}

/// Signed Fourier index of slot `i` in an `n`-point transform.
fn signed_index(i: usize, n: usize) -> f64 {
    if i <= n / 2 {
        i as f64
    } else {
        i as f64 - n as f64
    }
}

struct EtdCoefficients {
    q: f64,
    f1: f64,
    f2: f64,
    f3: f64,
}

fn etd_coefficients(z: f64, dt: f64) -> EtdCoefficients {
    let mut acc = [0.0; 4];
    for m in 0..CONTOUR_POINTS {
        let theta = TAU * (m as f64 + 0.5) / CONTOUR_POINTS as f64;
        let zr = z + Complex64::from_polar(1.0, theta);
        let ez = zr.exp();
        let z3 = zr * zr * zr;
        acc[0] += (((0.5 * zr).exp() - 1.0) / zr).re;
        acc[1] += ((-4.0 - zr + ez * (4.0 - 3.0 * zr + zr * zr)) / z3).re;
        acc[2] += ((2.0 + zr + ez * (zr - 2.0)) / z3).re;
        acc[3] += ((-4.0 - 3.0 * zr - zr * zr + ez * (4.0 - zr)) / z3).re;
    }
    let mean = |s: f64| dt * s / CONTOUR_POINTS as f64;
    EtdCoefficients {
        q: mean(acc[0]),
        f1: mean(acc[1]),
        f2: mean(acc[2]),
        f3: mean(acc[3]),
    }
}

impl SpectralStepper {
    /// Stepper for periodic grids of `n` samples spanning `length`.
    pub fn new(n: usize, length: f64, r: f64, dt: f64, dealias: bool) -> Result<Self> {
        if n < 4 {
            return Err(Error::InvalidParameter {
                name: "grid",
                reason: format!("{n} samples are too few for a spectral step"),
            });
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: format!("{dt} must be positive"),
            });
        }
        let mut planner = FftPlanner::new();
        let wavenumbers: Vec<f64> = (0..n).map(|i| TAU / length * signed_index(i, n)).collect();
        let mask = (0..n)
            .map(|i| {
                let keep = !dealias || 3.0 * signed_index(i, n).abs() < n as f64;
                if keep {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        let mut stepper = SpectralStepper {
            n,
            dt,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            wavenumbers,
            mask,
            e: vec![0.0; n],
            e2: vec![0.0; n],
            q: vec![0.0; n],
            f1: vec![0.0; n],
            f2: vec![0.0; n],
            f3: vec![0.0; n],
            scratch: vec![Complex64::new(0.0, 0.0); n],
        };
        for i in 0..n {
            let z = linear_symbol(r, stepper.wavenumbers[i]) * dt;
            let c = etd_coefficients(z, dt);
            stepper.e[i] = z.exp();
            stepper.e2[i] = (0.5 * z).exp();
            stepper.q[i] = c.q;
            stepper.f1[i] = c.f1;
            stepper.f2[i] = c.f2;
            stepper.f3[i] = c.f3;
        }
        Ok(stepper)
    }

    pub fn for_grid(grid: &FieldGrid, params: &ModelParams, dt: f64, dealias: bool) -> Result<Self> {
        if !grid.periodic {
            return Err(Error::NotPeriodic);
        }
        Self::new(grid.len(), grid.length(), params.r, dt, dealias)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// Unnormalised forward transform of real samples.
    pub fn transform(&self, u: &[f64]) -> Vec<Complex64> {
        let mut v: Vec<Complex64> = u.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward.process(&mut v);
        v
    }

    fn to_physical(&self, v: &[Complex64], out: &mut [Complex64]) {
        out.copy_from_slice(v);
        self.inverse.process(out);
        let scale = 1.0 / self.n as f64;
        for z in out.iter_mut() {
            *z *= scale;
        }
    }

    /// Dealiased transform of `-u^3`.
    fn nonlinear(&mut self, v: &[Complex64]) -> Vec<Complex64> {
        let mut work = std::mem::take(&mut self.scratch);
        self.to_physical(v, &mut work);
        for z in work.iter_mut() {
            *z = -(*z * *z * *z);
        }
        self.forward.process(&mut work);
        let out = work.iter().zip(&self.mask).map(|(z, m)| z * m).collect();
        self.scratch = work;
        out
    }

    /// Advances the spectral coefficients `v` by one step.
    pub fn step_coefficients(&mut self, v: &mut [Complex64]) {
        let n = self.n;
        let nv = self.nonlinear(v);
        let a: Vec<Complex64> = (0..n).map(|i| self.e2[i] * v[i] + self.q[i] * nv[i]).collect();
        let na = self.nonlinear(&a);
        let b: Vec<Complex64> = (0..n).map(|i| self.e2[i] * v[i] + self.q[i] * na[i]).collect();
        let nb = self.nonlinear(&b);
        let c: Vec<Complex64> = (0..n)
            .map(|i| self.e2[i] * a[i] + self.q[i] * (2.0 * nb[i] - nv[i]))
            .collect();
        let nc = self.nonlinear(&c);
        for i in 0..n {
            v[i] = self.e[i] * v[i] + self.f1[i] * nv[i] + 2.0 * self.f2[i] * (na[i] + nb[i]) + self.f3[i] * nc[i];
        }
    }

    /// Advances `grid` in place by one step.
    pub fn step(&mut self, grid: &mut FieldGrid) -> Result<StepStats> {
        if !grid.periodic {
            return Err(Error::NotPeriodic);
        }
        if grid.len() != self.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                found: grid.len(),
            });
        }
        let mut v = self.transform(&grid.u);
        self.step_coefficients(&mut v);
        let mut u = vec![Complex64::new(0.0, 0.0); self.n];
        self.to_physical(&v, &mut u);
        grid.t += self.dt;
        let mut leakage = 0.0f64;
        for (dst, z) in grid.u.iter_mut().zip(&u) {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::Diverged { t: grid.t });
            }
            *dst = z.re;
            leakage = leakage.max(z.im.abs());
        }
        Ok(StepStats { imag_leakage: leakage })
    }

    /// Steps until `grid.t` reaches `t_end` (to within a small fraction of a
    /// step). The last step is never shortened.
    pub fn advance_to(&mut self, grid: &mut FieldGrid, t_end: f64) -> Result<StepStats> {
        let mut worst = StepStats::default();
        while grid.t < t_end - 1e-9 * self.dt {
            let s = self.step(grid)?;
            worst.imag_leakage = worst.imag_leakage.max(s.imag_leakage);
        }
        Ok(worst)
    }
}

/// One ETDRK4 step of size `dt`, dealiased.
pub fn step_spectral(grid: &FieldGrid, params: &ModelParams, dt: f64) -> Result<FieldGrid> {
    let mut stepper = SpectralStepper::for_grid(grid, params, dt, true)?;
    let mut out = grid.clone();
    stepper.step(&mut out)?;
    Ok(out)
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Measures the growth rate of `eps0 cos(kx)` on the periodic grid of
/// `params` by integrating to `t_final` and fitting `log |u_k|` against time.
pub fn measure_growth_rate(params: &ModelParams, k: f64, eps0: f64, t_final: f64) -> Result<f64> {
    let mut grid = FieldGrid::from_fn(params, true, |x| eps0 * (k * x).cos());
    let n = grid.len();
    let index = k * grid.length() / TAU;
    let nearest = index.round();
    if (index - nearest).abs() > 1e-9 * nearest.abs().max(1.0) {
        return Err(Error::Unresolvable {
            k,
            reason: format!("k L / 2 pi = {index} is not an integer"),
        });
    }
    if 3.0 * nearest.abs() >= n as f64 {
        return Err(Error::Unresolvable {
            k,
            reason: format!("mode {nearest} lies outside the dealiased band of {n} samples"),
        });
    }
    if !(eps0 > 0.0 && t_final > 0.0) {
        return Err(Error::InvalidParameter {
            name: "eps0",
            reason: "seed amplitude and duration must be positive".into(),
        });
    }
    let slot = if nearest >= 0.0 { nearest as usize } else { n - (-nearest) as usize };
    let steps = ((t_final / 0.05).ceil() as usize).max(100);
    let dt = t_final / steps as f64;
    let mut stepper = SpectralStepper::for_grid(&grid, params, dt, true)?;
    let amplitude = |g: &FieldGrid, s: &SpectralStepper| 2.0 * s.transform(&g.u)[slot].norm() / n as f64;

    let mut times = vec![0.0];
    let mut logs = vec![amplitude(&grid, &stepper).ln()];
    for i in 1..=steps {
        stepper.step(&mut grid)?;
        let amp = amplitude(&grid, &stepper);
        if amp > 100.0 * eps0 {
            return Err(Error::NonlinearRegime { amplitude: amp, seed: eps0 });
        }
        times.push(i as f64 * dt);
        logs.push(amp.ln());
    }
    Ok(fit_slope(&times, &logs))
}
