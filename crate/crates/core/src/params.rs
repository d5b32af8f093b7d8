use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters shared by the lattice model and the reference solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Bifurcation parameter.
    pub r: f64,
    /// Inter-element coupling; the physical discretisation is `gamma = 1`.
    pub gamma: f64,
    /// Roll periods per element.
    pub p: u32,
    /// Element width, always `2 pi p`.
    pub h: f64,
    pub n_elements: usize,
    /// Field samples per element.
    pub m_samples: usize,
}

pub const MIN_SAMPLES_PER_ELEMENT: usize = 16;

/// Validates and builds a [`ModelParams`], computing `h = 2 pi p`.
pub fn make_params(r: f64, gamma: f64, p: u32, n_elements: usize, m_samples: usize) -> Result<ModelParams> {
    if !r.is_finite() {
        return Err(invalid("r", format!("{r} is not finite")));
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(invalid("gamma", format!("{gamma} is outside [0, 1]")));
    }
    if p == 0 {
        return Err(invalid("p", "must be at least 1".into()));
    }
    if n_elements < 2 {
        return Err(invalid("n_elements", format!("{n_elements} < 2; stencils need a neighbour")));
    }
    if m_samples < MIN_SAMPLES_PER_ELEMENT || !m_samples.is_power_of_two() {
        return Err(invalid(
            "m_samples",
            format!("{m_samples} must be a power of two and at least {MIN_SAMPLES_PER_ELEMENT}"),
        ));
    }
    Ok(ModelParams {
        r,
        gamma,
        p,
        h: 2.0 * PI * f64::from(p),
        n_elements,
        m_samples,
    })
}

fn invalid(name: &'static str, reason: String) -> Error {
    Error::InvalidParameter { name, reason }
}

impl ModelParams {
    /// Re-validates a value that may have been built by hand or deserialised.
    pub fn validate(&self) -> Result<()> {
        let checked = make_params(self.r, self.gamma, self.p, self.n_elements, self.m_samples)?;
        if (checked.h - self.h).abs() > 1e-12 * checked.h {
            return Err(invalid("h", format!("{} != 2 pi p = {}", self.h, checked.h)));
        }
        Ok(())
    }

    pub fn with_r(mut self, r: f64) -> Self {
        self.r = r;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    /// `(-1)^p`, the sign of `cos x` at an element edge.
    pub fn parity(&self) -> f64 {
        if self.p.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    pub fn dx(&self) -> f64 {
        self.h / self.m_samples as f64
    }

    pub fn domain_length(&self) -> f64 {
        self.h * self.n_elements as f64
    }

    /// Centre of element `j` (0-based) on the element-aligned layout, where
    /// the left edge of the domain sits at `-h/2` and every centre is a
    /// multiple of `2 pi`.
    pub fn element_centre(&self, j: usize) -> f64 {
        self.h * j as f64
    }

    pub fn left_edge(&self) -> f64 {
        -0.5 * self.h
    }

    /// Equilibrium amplitude `sqrt(r/3)` of a uniform roll pattern.
    pub fn equilibrium_amplitude(&self) -> f64 {
        (self.r.max(0.0) / 3.0).sqrt()
    }
}
