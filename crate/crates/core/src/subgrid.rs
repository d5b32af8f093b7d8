//! Fields inside an element, and the map back to amplitudes.
//!
//! Every reconstruction used here has the form
//!
//! ```text
//! u(x) = exp(+ix) (p0 + p1 x + p2 x^2) + exp(-ix) (m0 + m1 x + m2 x^2)
//! ```
//!
//! with `x` measured from the element centre. Element centres sit on
//! multiples of `2 pi`, so `exp(ix)` reads the same in local and absolute
//! coordinates. [`RollPolynomial`] stores the six coefficients and
//! differentiates exactly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{AmplitudeState, FieldGrid};
use crate::forcing::{BoundaryForcing, SignChoice, WallValues};
use crate::lattice::{mean_difference, second_difference, Topology};
use crate::model::topology_of;
use crate::params::ModelParams;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Coefficients of the wall-element forcing profiles.
///
/// On `exp(+ix)` the alpha bracket is
/// `ALPHA_CONSTANT - ALPHA_SLOPE x + QUADRATIC (h^2 - 12 x^2)` and the beta
/// bracket is `BETA_CONSTANT - BETA_SLOPE x + QUADRATIC (h^2 - 12 x^2)`.
/// The `MINUS_*` constants play the same roles on `exp(-ix)`.
pub mod wall_coefficients {
    use num_complex::Complex64;

    pub const ALPHA_CONSTANT: Complex64 = Complex64 { re: 7.0 / 16.0, im: 5.0 / 16.0 };
    pub const ALPHA_SLOPE: Complex64 = Complex64 { re: 2.0 / 4.0, im: 3.0 / 4.0 };
    pub const BETA_CONSTANT: Complex64 = Complex64 { re: 3.0 / 16.0, im: 1.0 / 16.0 };
    pub const BETA_SLOPE: Complex64 = Complex64 { re: 0.0, im: 1.0 / 4.0 };
    pub const QUADRATIC: Complex64 = Complex64 { re: 1.0 / 96.0, im: -1.0 / 96.0 };

    pub const MINUS_ALPHA_CONSTANT: Complex64 = Complex64 { re: 7.0 / 16.0, im: -5.0 / 16.0 };
    pub const MINUS_ALPHA_SLOPE: Complex64 = Complex64 { re: 2.0 / 4.0, im: -3.0 / 4.0 };
    pub const MINUS_BETA_CONSTANT: Complex64 = Complex64 { re: 3.0 / 16.0, im: -1.0 / 16.0 };
    pub const MINUS_BETA_SLOPE: Complex64 = Complex64 { re: 0.0, im: -1.0 / 4.0 };
    pub const MINUS_QUADRATIC: Complex64 = Complex64 { re: 1.0 / 96.0, im: 1.0 / 96.0 };
}

/// `exp(ix) P(x) + exp(-ix) M(x)` with quadratic `P`, `M`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RollPolynomial {
    pub plus: [Complex64; 3],
    pub minus: [Complex64; 3],
}

impl RollPolynomial {
    pub fn rolls(a: Complex64, b: Complex64) -> Self {
        RollPolynomial {
            plus: [a, ZERO, ZERO],
            minus: [b, ZERO, ZERO],
        }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let poly = |c: &[Complex64; 3]| c[0] + x * (c[1] + x * c[2]);
        Complex64::from_polar(1.0, x) * poly(&self.plus) + Complex64::from_polar(1.0, -x) * poly(&self.minus)
    }

    /// Exact `d/dx`: `exp(ix) P -> exp(ix) (iP + P')`.
    pub fn derivative(&self) -> Self {
        let diff = |c: &[Complex64; 3], k: Complex64| [k * c[0] + c[1], k * c[1] + 2.0 * c[2], k * c[2]];
        RollPolynomial {
            plus: diff(&self.plus, I),
            minus: diff(&self.minus, -I),
        }
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        (0..n).fold(*self, |p, _| p.derivative())
    }

    /// The same field seen under `x -> -x`.
    pub fn mirrored(&self) -> Self {
        let flip = |c: &[Complex64; 3]| [c[0], -c[1], c[2]];
        RollPolynomial {
            plus: flip(&self.minus),
            minus: flip(&self.plus),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        RollPolynomial {
            plus: self.plus.map(|c| s * c),
            minus: self.minus.map(|c| s * c),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = *self;
        for k in 0..3 {
            out.plus[k] += other.plus[k];
            out.minus[k] += other.minus[k];
        }
        out
    }
}

/// Field of an interior element to first order in the coupling:
///
/// ```text
/// u_j = a_j e^{ix} + (g/4h) e^{ix} [(d2 a - 2i md b) + (4 md a - 2i d2 b) x]
///     + b_j e^{-ix} + (g/4h) e^{-ix} [(d2 b + 2i md a) + (4 md b + 2i d2 a) x]
/// ```
///
/// `d2` and `md` are [`second_difference`] and [`mean_difference`], and `g` is
/// `params.gamma`.
pub fn interior_polynomial(
    state: &AmplitudeState,
    params: &ModelParams,
    j: usize,
    topology: Topology,
) -> Result<RollPolynomial> {
    state.check_len(state.a.len())?;
    let d2a = second_difference(&state.a, j, topology)?;
    let d2b = second_difference(&state.b, j, topology)?;
    let mda = mean_difference(&state.a, j, topology)?;
    let mdb = mean_difference(&state.b, j, topology)?;
    let g = params.gamma / (4.0 * params.h);
    Ok(RollPolynomial {
        plus: [state.a[j] + g * (d2a - 2.0 * I * mdb), g * (4.0 * mda - 2.0 * I * d2b), ZERO],
        minus: [state.b[j] + g * (d2b + 2.0 * I * mda), g * (4.0 * mdb + 2.0 * I * d2a), ZERO],
    })
}

/// Field of the element touching the left wall, from its own amplitudes
/// `(a1, b1)`, its neighbour's `(a2, b2)` and the wall data.
pub fn wall_polynomial(
    a1: Complex64,
    b1: Complex64,
    a2: Complex64,
    b2: Complex64,
    params: &ModelParams,
    wall: WallValues,
    sign: SignChoice,
) -> RollPolynomial {
    use wall_coefficients::*;
    let s = sign.sigma();
    let h = params.h;
    let g = params.gamma / (4.0 * h);
    let g2 = s * params.gamma * params.gamma / h;
    let (alpha, beta) = (wall.alpha, wall.beta);

    let plus_const = -(2.0 + s * I) * a1 + a2 - s * b1 - I * b2;
    let plus_slope = 2.0 * (s * I * a1 + a2 + s * (1.0 + s * 2.0 * I) * b1 - I * b2);
    let minus_const = -s * a1 + I * a2 - (2.0 - s * I) * b1 + b2;
    let minus_slope = 2.0 * (s * (1.0 - s * 2.0 * I) * a1 + I * a2 - s * I * b1 + b2);

    // h^2 - 12 x^2 split into its constant and quadratic parts.
    let quad = |q: Complex64| (q * h * h, -12.0 * q);
    let (pq0, pq2) = quad(QUADRATIC);
    let (mq0, mq2) = quad(MINUS_QUADRATIC);

    RollPolynomial {
        plus: [
            a1 + g * plus_const + g2 * (alpha * (ALPHA_CONSTANT + pq0) + beta * (BETA_CONSTANT + pq0)),
            g * plus_slope - g2 * (alpha * ALPHA_SLOPE + beta * BETA_SLOPE),
            g2 * (alpha + beta) * pq2,
        ],
        minus: [
            b1 + g * minus_const + g2 * (alpha * (MINUS_ALPHA_CONSTANT + mq0) + beta * (MINUS_BETA_CONSTANT + mq0)),
            g * minus_slope - g2 * (alpha * MINUS_ALPHA_SLOPE + beta * MINUS_BETA_SLOPE),
            g2 * (alpha + beta) * mq2,
        ],
    }
}

fn check_wall(state: &AmplitudeState, forcing: &BoundaryForcing, sign: SignChoice) -> Result<()> {
    forcing.check_sign(sign)?;
    state.check_len(state.a.len())?;
    if state.len() < 2 {
        return Err(Error::IndexOutOfRange { index: 0, len: state.len() });
    }
    Ok(())
}

/// Left-wall element field with wall data at `state.t`.
pub fn left_wall_polynomial(
    state: &AmplitudeState,
    params: &ModelParams,
    forcing: &BoundaryForcing,
    sign: SignChoice,
) -> Result<RollPolynomial> {
    check_wall(state, forcing, sign)?;
    Ok(wall_polynomial(
        state.a[0],
        state.b[0],
        state.a[1],
        state.b[1],
        params,
        forcing.left_values(state.t),
        sign,
    ))
}

/// Right-wall element field: the left-wall field of the mirrored lattice,
/// reflected back.
pub fn right_wall_polynomial(
    state: &AmplitudeState,
    params: &ModelParams,
    forcing: &BoundaryForcing,
    sign: SignChoice,
) -> Result<RollPolynomial> {
    check_wall(state, forcing, sign)?;
    let n = state.len();
    Ok(wall_polynomial(
        state.b[n - 1],
        state.a[n - 1],
        state.b[n - 2],
        state.a[n - 2],
        params,
        forcing.right_values(state.t),
        sign,
    )
    .mirrored())
}

/// Field of element `j` as the lattice model sees it: wall elements on a
/// bounded lattice use the wall form, everything else the interior form.
pub fn element_polynomial(
    state: &AmplitudeState,
    params: &ModelParams,
    forcing: &BoundaryForcing,
    j: usize,
) -> Result<RollPolynomial> {
    let n = state.len();
    match forcing.sign() {
        Some(sign) if j == 0 => left_wall_polynomial(state, params, forcing, sign),
        Some(sign) if j + 1 == n => right_wall_polynomial(state, params, forcing, sign),
        _ => interior_polynomial(state, params, j, topology_of(forcing)),
    }
}

fn check_local(params: &ModelParams, xs: &[f64]) -> Result<()> {
    let half = 0.5 * params.h * (1.0 + 1e-12);
    match xs.iter().find(|x| !(x.abs() <= half)) {
        Some(x) => Err(Error::InvalidParameter {
            name: "x_local",
            reason: format!("{x} lies outside [-h/2, h/2]"),
        }),
        None => Ok(()),
    }
}

/// Sample of a reconstruction before the real part is taken.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubgridSample {
    pub x_local: f64,
    pub value: Complex64,
}

pub fn reconstruct_interior_complex(
    state: &AmplitudeState,
    params: &ModelParams,
    j: usize,
    topology: Topology,
    xs: &[f64],
) -> Result<Vec<SubgridSample>> {
    check_local(params, xs)?;
    let poly = interior_polynomial(state, params, j, topology)?;
    Ok(xs.iter().map(|&x| SubgridSample { x_local: x, value: poly.eval(x) }).collect())
}

/// Real field of interior element `j` at local positions `xs`.
pub fn reconstruct_interior(
    state: &AmplitudeState,
    params: &ModelParams,
    j: usize,
    topology: Topology,
    xs: &[f64],
) -> Result<Vec<f64>> {
    Ok(reconstruct_interior_complex(state, params, j, topology, xs)?
        .into_iter()
        .map(|s| s.value.re)
        .collect())
}

/// Real field of the left-wall element at local positions `xs`.
pub fn reconstruct_boundary(
    state: &AmplitudeState,
    params: &ModelParams,
    forcing: &BoundaryForcing,
    sign: SignChoice,
    xs: &[f64],
) -> Result<Vec<f64>> {
    check_local(params, xs)?;
    let poly = left_wall_polynomial(state, params, forcing, sign)?;
    Ok(xs.iter().map(|&x| poly.eval(x).re).collect())
}

/// Samples the lattice field on the element-aligned grid of `params`.
/// Periodic forcing gives a periodic grid, walls give a bounded one.
pub fn render_field(state: &AmplitudeState, params: &ModelParams, forcing: &BoundaryForcing) -> Result<FieldGrid> {
    state.check_len(params.n_elements)?;
    let mut grid = FieldGrid::zeros(params, forcing.is_periodic());
    grid.t = state.t;
    let m = params.m_samples;
    let dx = params.dx();
    for j in 0..params.n_elements {
        let poly = element_polynomial(state, params, forcing, j)?;
        let count = if !grid.periodic && j + 1 == params.n_elements { m + 1 } else { m };
        for k in 0..count {
            grid.u[j * m + k] = poly.eval(-0.5 * params.h + k as f64 * dx).re;
        }
    }
    Ok(grid)
}

/// Trapezoidal element average of one element's closed sample set.
///
/// `samples[k]` is the field at `x_start + k dx`, `k = 0..=m`, with both end
/// points at half weight. Returns `((1/h) int u e^{-ix}, (1/h) int u e^{+ix})`.
pub fn element_average(samples: &[f64], x_start: f64, dx: f64, h: f64) -> (Complex64, Complex64) {
    let last = samples.len().saturating_sub(1);
    let (mut a, mut b) = (ZERO, ZERO);
    for (k, &u) in samples.iter().enumerate() {
        let w = if k == 0 || k == last { 0.5 } else { 1.0 };
        let phase = Complex64::from_polar(1.0, x_start + k as f64 * dx);
        a += w * u * phase.conj();
        b += w * u * phase;
    }
    (a * dx / h, b * dx / h)
}

/// Element averages `a_j = (1/h) int u e^{-ix} dx`, `b_j = (1/h) int u e^{+ix} dx`.
///
/// Each element is integrated with [`element_average`] on its own samples;
/// the node shared by two elements enters both at half weight. Phases refer
/// to the absolute coordinate.
pub fn extract_amplitudes(grid: &FieldGrid, params: &ModelParams) -> Result<AmplitudeState> {
    grid.check_aligned(params)?;
    let n = grid.len();
    let m = params.m_samples;
    let mut state = AmplitudeState::zeros(params.n_elements);
    state.t = grid.t;
    let mut samples = vec![0.0; m + 1];
    for j in 0..params.n_elements {
        for (k, s) in samples.iter_mut().enumerate() {
            *s = grid.u[(j * m + k) % n];
        }
        (state.a[j], state.b[j]) = element_average(&samples, grid.x(j * m), grid.dx, params.h);
    }
    Ok(state)
}

/// Mismatch of the two inter-element coupling conditions on the field `u`
/// around element `j`, with all three fields reconstructed at coupling `gamma`.
///
/// Returns `(right, left)`:
///
/// ```text
/// right = [u_j + u_j']_{+h/2} - (1-g)[u_j + u_j']_{-h/2} - g [u_{j+1} + u_{j+1}']_{-h/2}
/// left  = [u_j - u_j']_{-h/2} - (1-g)[u_j - u_j']_{+h/2} - g [u_{j-1} - u_{j-1}']_{+h/2}
/// ```
///
/// Derivatives are exact. Needs two neighbours on each side of `j`.
pub fn ibc_residual(
    state: &AmplitudeState,
    params: &ModelParams,
    j: usize,
    gamma: f64,
    topology: Topology,
) -> Result<(Complex64, Complex64)> {
    let n = state.len();
    let at = params.with_gamma(gamma);
    let (left_j, right_j) = crate::lattice::neighbours(n, j, topology)?;
    let here = interior_polynomial(state, &at, j, topology)?;
    let next = interior_polynomial(state, &at, right_j, topology)?;
    let prev = interior_polynomial(state, &at, left_j, topology)?;
    let half = 0.5 * params.h;
    let plus = |p: &RollPolynomial, x: f64| p.eval(x) + p.derivative().eval(x);
    let minus = |p: &RollPolynomial, x: f64| p.eval(x) - p.derivative().eval(x);
    let right = plus(&here, half) - (1.0 - gamma) * plus(&here, -half) - gamma * plus(&next, -half);
    let left = minus(&here, -half) - (1.0 - gamma) * minus(&here, half) - gamma * minus(&prev, half);
    Ok((right, left))
}

/// Wall-layer profiles of the left-wall element: the field with zero
/// amplitudes and unit alpha (or unit beta), and the exact second derivative
/// of each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileTable {
    pub x: Vec<f64>,
    pub alpha_profile: Vec<f64>,
    pub beta_profile: Vec<f64>,
    pub alpha_profile_xx: Vec<f64>,
    pub beta_profile_xx: Vec<f64>,
}

pub fn boundary_profiles(params: &ModelParams, sign: SignChoice, xs: &[f64]) -> Result<ProfileTable> {
    boundary_profiles_scaled(params, sign, xs, 1.0, 1.0)
}

/// As [`boundary_profiles`] with wall values `alpha` and `beta` in place of one.
pub fn boundary_profiles_scaled(
    params: &ModelParams,
    sign: SignChoice,
    xs: &[f64],
    alpha: f64,
    beta: f64,
) -> Result<ProfileTable> {
    check_local(params, xs)?;
    let z = ZERO;
    let alpha_poly = wall_polynomial(z, z, z, z, params, WallValues { alpha, beta: 0.0 }, sign);
    let beta_poly = wall_polynomial(z, z, z, z, params, WallValues { alpha: 0.0, beta }, sign);
    let (alpha_xx, beta_xx) = (alpha_poly.nth_derivative(2), beta_poly.nth_derivative(2));
    let sample = |p: &RollPolynomial| xs.iter().map(|&x| p.eval(x).re).collect::<Vec<_>>();
    Ok(ProfileTable {
        x: xs.to_vec(),
        alpha_profile: sample(&alpha_poly),
        beta_profile: sample(&beta_poly),
        alpha_profile_xx: sample(&alpha_xx),
        beta_profile_xx: sample(&beta_xx),
    })
}
