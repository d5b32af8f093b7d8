//! Amplitude-lattice discretisation of the one-dimensional Swift-Hohenberg
//! equation
//!
//! ```text
//! u_t = r u - (1 + d_xx)^2 u - u^3
//! ```
//!
//! The domain is cut into elements of width `h = 2 pi p`, each carrying `p`
//! rolls. Inside element `j` the field is parametrised by two complex
//! amplitudes, `a_j` on `exp(+ix)` and `b_j` on `exp(-ix)`, and the crate
//! provides:
//!
//! * [`model`]: the lattice ODEs for the amplitudes, interior and
//!   boundary-adjacent stencils, and an RK4 driver.
//! * [`subgrid`]: the map between amplitudes and fields (element averages,
//!   in-element reconstruction, coupling-condition residuals).
//! * [`direct`]: reference solvers for the PDE itself, spectral on periodic
//!   domains and finite-difference on bounded ones.
//! * [`analysis`]: closed-form rates and equilibria, and the harness that
//!   compares the lattice model against the reference solver.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod direct;
mod error;
pub mod field;
pub mod forcing;
pub mod lattice;
pub mod model;
pub mod params;
pub mod subgrid;

pub use error::{Error, Result};
pub use field::{AmplitudeState, FieldGrid};
pub use forcing::{BoundaryForcing, ForcingKind, SignChoice, Signal};
pub use lattice::{mean_difference, second_difference, Topology};
pub use num_complex::Complex64;
pub use params::{make_params, ModelParams};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
