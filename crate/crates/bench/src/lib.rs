//! Shared fixtures for the benchmarks.

use num_complex::Complex64;
use shpattern_core::field::FieldGrid;
use shpattern_core::{make_params, AmplitudeState, ModelParams};

/// Supercritical parameters with `n` elements of 32 samples each.
pub fn params(n: usize) -> ModelParams {
    make_params(0.1, 1.0, 1, n, 32).expect("fixture parameters are valid")
}

/// Slowly modulated real-sector lattice.
pub fn lattice(n: usize) -> AmplitudeState {
    let a = (0..n)
        .map(|j| {
            let s = std::f64::consts::TAU * j as f64 / n as f64;
            Complex64::new(0.15 * (1.0 + 0.2 * s.cos()), 0.05 * s.sin())
        })
        .collect();
    AmplitudeState::real_sector(a)
}

/// Roll field with a long-wave envelope.
pub fn field(params: &ModelParams, periodic: bool) -> FieldGrid {
    let length = params.domain_length();
    FieldGrid::from_fn(params, periodic, |x| {
        0.2 * x.cos() * (1.0 + 0.3 * (std::f64::consts::TAU * x / length).cos())
    })
}
