//! Lattice ODEs for the roll amplitudes.
//!
//! Interior elements evolve by
//!
//! ```text
//! a_j' = r a_j + (4 g^2 / h^2) d2(a)_j - 3 g^2 a_j^2 b_j
//! b_j' = r b_j + (4 g^2 / h^2) d2(b)_j - 3 g^2 a_j b_j^2
//! ```
//!
//! with `g` the coupling parameter. On a bounded lattice the first element
//! uses a modified stencil that carries the wall data, and the last element
//! uses its mirror image. The second element from a wall uses the interior
//! form unchanged.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::AmplitudeState;
use crate::forcing::{BoundaryForcing, SignChoice, WallValues};
use crate::lattice::{second_difference, Topology};
use crate::params::ModelParams;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub type Rates = (Complex64, Complex64);

fn coupling(params: &ModelParams) -> f64 {
    4.0 * params.gamma * params.gamma / (params.h * params.h)
}

pub fn topology_of(forcing: &BoundaryForcing) -> Topology {
    if forcing.is_periodic() {
        Topology::Periodic
    } else {
        Topology::Bounded
    }
}

/// `(a_j', b_j')` for an element with two neighbours.
pub fn interior_rhs(state: &AmplitudeState, params: &ModelParams, j: usize, topology: Topology) -> Result<Rates> {
    state.check_len(state.a.len())?;
    let c = coupling(params);
    let g2 = params.gamma * params.gamma;
    let d2a = second_difference(&state.a, j, topology)?;
    let d2b = second_difference(&state.b, j, topology)?;
    let (a, b) = (state.a[j], state.b[j]);
    Ok((
        params.r * a + c * d2a - 3.0 * g2 * a * a * b,
        params.r * b + c * d2b - 3.0 * g2 * a * b * b,
    ))
}

/// The wall-element stencil written out on the four amplitudes it reads.
///
/// `a1, b1` belong to the element touching the wall and `a2, b2` to its
/// neighbour. The cubic term carries no `gamma^2` factor here.
pub fn wall_element_rhs(
    a1: Complex64,
    b1: Complex64,
    a2: Complex64,
    b2: Complex64,
    params: &ModelParams,
    wall: WallValues,
    sign: SignChoice,
) -> Rates {
    let s = sign.sigma();
    let c = coupling(params);
    let push = s * params.gamma * params.gamma / params.h * (wall.alpha + wall.beta);
    (
        params.r * a1 + c * (a2 - 2.0 * a1 - s * b1) - 3.0 * a1 * a1 * b1 - push * (1.0 - I),
        params.r * b1 + c * (b2 - 2.0 * b1 - s * a1) - 3.0 * a1 * b1 * b1 - push * (1.0 + I),
    )
}

fn check_wall(state: &AmplitudeState, forcing: &BoundaryForcing, sign: SignChoice) -> Result<()> {
    forcing.check_sign(sign)?;
    state.check_len(state.a.len())?;
    if state.len() < 2 {
        return Err(Error::IndexOutOfRange {
            index: 0,
            len: state.len(),
        });
    }
    Ok(())
}

/// `(a_1', b_1')` for the element at the left wall, wall data taken at `state.t`.
pub fn left_boundary_rhs(
    state: &AmplitudeState,
    params: &ModelParams,
    forcing: &BoundaryForcing,
    sign: SignChoice,
) -> Result<Rates> {
    check_wall(state, forcing, sign)?;
    Ok(wall_element_rhs(
        state.a[0],
        state.b[0],
        state.a[1],
        state.b[1],
        params,
        forcing.left_values(state.t),
        sign,
    ))
}

/// `(a_N', b_N')` at the right wall: the left stencil under `x -> -x`,
/// which exchanges the roles of `a` and `b`.
pub fn right_boundary_rhs(
    state: &AmplitudeState,
    params: &ModelParams,
    forcing: &BoundaryForcing,
    sign: SignChoice,
) -> Result<Rates> {
    check_wall(state, forcing, sign)?;
    let n = state.len();
    let (db, da) = wall_element_rhs(
        state.b[n - 1],
        state.a[n - 1],
        state.b[n - 2],
        state.a[n - 2],
        params,
        forcing.right_values(state.t),
        sign,
    );
    Ok((da, db))
}

/// Time derivative of the whole lattice.
pub fn model_rhs(
    state: &AmplitudeState,
    params: &ModelParams,
    forcing: &BoundaryForcing,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let n = params.n_elements;
    state.check_len(n)?;
    let mut da = vec![Complex64::new(0.0, 0.0); n];
    let mut db = da.clone();
    let topology = topology_of(forcing);
    let interior = match forcing.sign() {
        None => 0..n,
        Some(sign) => {
            (da[0], db[0]) = left_boundary_rhs(state, params, forcing, sign)?;
            (da[n - 1], db[n - 1]) = right_boundary_rhs(state, params, forcing, sign)?;
            1..n - 1
        }
    };
    for j in interior {
        (da[j], db[j]) = interior_rhs(state, params, j, topology)?;
    }
    Ok((da, db))
}

/// Largest step accepted by [`rk4_step`]: a tenth of `h^2 / 8`.
pub fn max_stable_dt(params: &ModelParams) -> f64 {
    0.1 * params.h * params.h / 8.0
}

fn axpy(state: &AmplitudeState, dt: f64, k: &(Vec<Complex64>, Vec<Complex64>)) -> AmplitudeState {
    AmplitudeState {
        t: state.t + dt,
        a: state.a.iter().zip(&k.0).map(|(x, d)| x + dt * d).collect(),
        b: state.b.iter().zip(&k.1).map(|(x, d)| x + dt * d).collect(),
    }
}

/// One classical fourth-order Runge-Kutta step. Wall signals are evaluated
/// at the stage times.
pub fn rk4_step(
    state: &AmplitudeState,
    params: &ModelParams,
    forcing: &BoundaryForcing,
    dt: f64,
) -> Result<AmplitudeState> {
    let limit = max_stable_dt(params);
    if !(dt > 0.0 && dt <= limit) {
        return Err(Error::UnstableTimeStep { dt, limit });
    }
    let k1 = model_rhs(state, params, forcing)?;
    let k2 = model_rhs(&axpy(state, 0.5 * dt, &k1), params, forcing)?;
    let k3 = model_rhs(&axpy(state, 0.5 * dt, &k2), params, forcing)?;
    let k4 = model_rhs(&axpy(state, dt, &k3), params, forcing)?;
    let combine = |x: &[Complex64], k: [&[Complex64]; 4]| -> Vec<Complex64> {
        (0..x.len())
            .map(|i| x[i] + dt / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]))
            .collect()
    };
    let next = AmplitudeState {
        t: state.t + dt,
        a: combine(&state.a, [&k1.0, &k2.0, &k3.0, &k4.0]),
        b: combine(&state.b, [&k1.1, &k2.1, &k3.1, &k4.1]),
    };
    if !next.is_finite() {
        return Err(Error::Diverged { t: next.t });
    }
    Ok(next)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub states: Vec<AmplitudeState>,
}

impl Trajectory {
    pub fn last(&self) -> &AmplitudeState {
        self.states.last().expect("trajectory holds at least the initial state")
    }

    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }
}

/// Integrates from `state.t` to `t_end`.
///
/// The step is shortened uniformly so that a whole number of steps lands on
/// `t_end`. Every `stride`-th state is recorded, plus the first and last.
pub fn run_model(
    state: &AmplitudeState,
    params: &ModelParams,
    forcing: &BoundaryForcing,
    t_end: f64,
    dt: f64,
    stride: usize,
) -> Result<Trajectory> {
    forcing.validate(params)?;
    state.check_len(params.n_elements)?;
    let span = t_end - state.t;
    if span < 0.0 || !span.is_finite() {
        return Err(Error::InvalidParameter {
            name: "t_end",
            reason: format!("{t_end} precedes the initial time {}", state.t),
        });
    }
    let steps = (span / dt).ceil() as usize;
    let step = if steps == 0 { dt } else { span / steps as f64 };
    let stride = stride.max(1);
    let t0 = state.t;
    let mut current = state.clone();
    let mut states = vec![current.clone()];
    for i in 1..=steps {
        current = rk4_step(&current, params, forcing, step)?;
        current.t = t0 + i as f64 * step;
        if i % stride == 0 || i == steps {
            states.push(current.clone());
        }
    }
    Ok(Trajectory { states })
}

/// Discrete Ginzburg-Landau right-hand side on a periodic lattice:
/// `r a_j + (c/h^2)(a_{j+1} - 2 a_j + a_{j-1}) - d |a_j|^2 a_j`.
pub fn gle_rhs(a: &[Complex64], r: f64, c: f64, d: f64, h: f64) -> Result<Vec<Complex64>> {
    if a.len() < 2 {
        return Err(Error::SizeMismatch {
            expected: 2,
            found: a.len(),
        });
    }
    (0..a.len())
        .map(|j| {
            let d2 = second_difference(a, j, Topology::Periodic)?;
            Ok(r * a[j] + c / (h * h) * d2 - d * a[j].norm_sqr() * a[j])
        })
        .collect()
}

/// `max_j |b_j - conj(a_j)|`; zero exactly when the state describes a real field.
pub fn reality_check(state: &AmplitudeState) -> f64 {
    state
        .a
        .iter()
        .zip(&state.b)
        .map(|(a, b)| (b - a.conj()).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forcing::{ForcingKind, Signal};
    use crate::params::make_params;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn params(r: f64, n: usize) -> ModelParams {
        make_params(r, 1.0, 1, n, 16).unwrap()
    }

    #[test]
    fn interior_examples() {
        let p = params(0.0, 3);
        let zero = AmplitudeState::zeros(3);
        assert_eq!(interior_rhs(&zero, &p, 1, Topology::Bounded).unwrap(), (c(0.0, 0.0), c(0.0, 0.0)));

        let p = params(0.03, 3);
        let uniform = AmplitudeState::new(vec![c(0.1, 0.0); 3], vec![c(0.1, 0.0); 3]).unwrap();
        let (da, db) = interior_rhs(&uniform, &p, 1, Topology::Bounded).unwrap();
        assert!(da.norm() < 1e-17 && db.norm() < 1e-17);

        let p = params(0.0, 3);
        let bump = AmplitudeState::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0); 3]).unwrap();
        let (da, db) = interior_rhs(&bump, &p, 1, Topology::Bounded).unwrap();
        assert!((da - c(1.0 / (PI * PI), 0.0)).norm() < 1e-15);
        assert!((da.re - 0.10132).abs() < 1e-5);
        assert_eq!(db, c(0.0, 0.0));

        assert!(interior_rhs(&bump, &p, 0, Topology::Bounded).is_err());
        assert!(interior_rhs(&bump, &p, 3, Topology::Periodic).is_err());
    }

    #[test]
    fn left_wall_examples() {
        let r = 0.07;
        let p = params(r, 4);
        let none = BoundaryForcing::homogeneous(ForcingKind::EvenGiven, &p);

        // sin-locked rolls stay sin-locked: the coupling term vanishes.
        let s = 0.2;
        let st = AmplitudeState::real_sector(vec![c(0.0, s); 4]);
        let (da, _) = left_boundary_rhs(&st, &p, &none, SignChoice::Upper).unwrap();
        assert!((da - c(0.0, s * (r - 3.0 * s * s))).norm() < 1e-15);

        // the cos-locked component decays at r - 8/h^2 (linear part).
        let rho = 1e-4;
        let st = AmplitudeState::real_sector(vec![c(rho, 0.0); 4]);
        let (da, _) = left_boundary_rhs(&st, &p, &none, SignChoice::Upper).unwrap();
        let linear = (r - 8.0 / (p.h * p.h)) * rho;
        assert!((da.re - linear).abs() < 4.0 * rho.powi(3));
        assert!(da.im.abs() < 1e-18);

        let p0 = params(0.0, 4);
        let pushed = BoundaryForcing::left(ForcingKind::EvenGiven, Signal::constant(0.06), Signal::constant(0.04), &p0);
        let (da, db) = left_boundary_rhs(&AmplitudeState::zeros(4), &p0, &pushed, SignChoice::Upper).unwrap();
        let expect = -(1.0 / (2.0 * PI)) * c(1.0, -1.0) * 0.1;
        assert!((da - expect).norm() < 1e-15);
        assert!((db - expect.conj()).norm() < 1e-15);
    }

    #[test]
    fn wall_kind_and_size_errors() {
        let p = params(0.0, 4);
        let st = AmplitudeState::zeros(4);
        let odd = BoundaryForcing::homogeneous(ForcingKind::OddGiven, &p);
        assert!(left_boundary_rhs(&st, &p, &odd, SignChoice::Upper).is_err());
        assert!(left_boundary_rhs(&st, &p, &BoundaryForcing::periodic(), SignChoice::Upper).is_err());
        assert!(left_boundary_rhs(&AmplitudeState::zeros(1), &p, &odd, SignChoice::Lower).is_err());
        assert!(model_rhs(&AmplitudeState::zeros(3), &p, &odd).is_err());
    }

    #[test]
    fn right_wall_is_mirror_of_left() {
        let p = params(0.02, 5);
        let forcing = BoundaryForcing::left(ForcingKind::OddGiven, Signal::constant(0.3), Signal::constant(-0.1), &p)
            .with_right(Signal::constant(0.3), Signal::constant(-0.1));
        let st = AmplitudeState::new(
            (0..5).map(|j| c(0.1 * j as f64, 0.05 - 0.02 * j as f64)).collect(),
            (0..5).map(|j| c(-0.03 * j as f64, 0.07)).collect(),
        )
        .unwrap();
        let (ra, rb) = right_boundary_rhs(&st, &p, &forcing, SignChoice::Lower).unwrap();
        let (la, lb) = left_boundary_rhs(&st.mirrored(), &p, &forcing, SignChoice::Lower).unwrap();
        assert_eq!((ra, rb), (lb, la));

        let p0 = params(0.0, 4);
        let right_only = BoundaryForcing::homogeneous(ForcingKind::EvenGiven, &p0)
            .with_right(Signal::constant(0.1), Signal::zero());
        let (da, db) = right_boundary_rhs(&AmplitudeState::zeros(4), &p0, &right_only, SignChoice::Upper).unwrap();
        assert!((db + (1.0 / p0.h) * c(1.0, -1.0) * 0.1).norm() < 1e-15);
        assert!((da + (1.0 / p0.h) * c(1.0, 1.0) * 0.1).norm() < 1e-15);
        assert_eq!(
            right_boundary_rhs(&AmplitudeState::zeros(4), &p0, &BoundaryForcing::homogeneous(ForcingKind::EvenGiven, &p0), SignChoice::Upper).unwrap(),
            (c(0.0, 0.0), c(0.0, 0.0))
        );
    }

    #[test]
    fn assembled_rhs_examples() {
        let p = params(0.0, 3);
        let periodic = BoundaryForcing::periodic();
        let (da, db) = model_rhs(&AmplitudeState::zeros(3), &p, &periodic).unwrap();
        assert!(da.iter().chain(&db).all(|z| *z == c(0.0, 0.0)));

        let st = AmplitudeState::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0); 3]).unwrap();
        let (da, _) = model_rhs(&st, &p, &periodic).unwrap();
        let scale = 4.0 / (p.h * p.h);
        for (got, want) in da.iter().zip([-2.0, 1.0, 1.0]) {
            assert!((got - c(scale * want, 0.0)).norm() < 1e-15);
        }

        let p = params(0.05, 6);
        let a0 = c(0.08, -0.03);
        let st = AmplitudeState::real_sector(vec![a0; 6]);
        let (da, db) = model_rhs(&st, &p, &periodic).unwrap();
        let expect = p.r * a0 - 3.0 * a0.norm_sqr() * a0;
        for j in 0..6 {
            assert!((da[j] - expect).norm() < 1e-16);
            assert!((db[j] - expect.conj()).norm() < 1e-16);
        }
    }

    #[test]
    fn second_element_uses_interior_stencil() {
        let p = params(0.01, 5);
        let forcing = BoundaryForcing::left(ForcingKind::EvenGiven, Signal::constant(0.2), Signal::zero(), &p);
        let st = AmplitudeState::real_sector((0..5).map(|j| c(0.01 * j as f64, 0.02)).collect());
        let (da, db) = model_rhs(&st, &p, &forcing).unwrap();
        assert_eq!((da[1], db[1]), interior_rhs(&st, &p, 1, Topology::Bounded).unwrap());
    }

    #[test]
    fn rk4_rejects_large_steps_and_keeps_zero() {
        let p = params(0.1, 4);
        let f = BoundaryForcing::periodic();
        assert!(matches!(
            rk4_step(&AmplitudeState::zeros(4), &p, &f, 1.0),
            Err(Error::UnstableTimeStep { .. })
        ));
        let traj = run_model(&AmplitudeState::zeros(4), &p, &f, 50.0, 0.25, 10).unwrap();
        assert_eq!(traj.last().t, 50.0);
        assert!(traj.last().max_abs() == 0.0);
        assert_eq!(traj.states.len(), 21);
    }

    #[test]
    fn rk4_detects_blow_up() {
        let p = make_params(-1.0, 1.0, 1, 2, 16).unwrap();
        // Large anti-conjugate data make the cubic term destabilising.
        let st = AmplitudeState::new(vec![c(0.0, 1e3); 2], vec![c(0.0, 1e3); 2]).unwrap();
        let err = run_model(&st, &p, &BoundaryForcing::periodic(), 10.0, 0.1, 1).unwrap_err();
        assert!(matches!(err, Error::Diverged { .. }));
    }

    #[test]
    fn uniform_lattice_relaxes_to_equilibrium() {
        let p = params(0.05, 4);
        let st = AmplitudeState::real_sector(vec![c(0.01, 0.0); 4]);
        let end = run_model(&st, &p, &BoundaryForcing::periodic(), 400.0, 0.25, 1000).unwrap();
        let target = (0.05f64 / 3.0).sqrt();
        assert!((target - 0.1291).abs() < 1e-4);
        for a in &end.last().a {
            assert!((a.norm() - target).abs() < 1e-4);
        }
    }

    #[test]
    fn gle_examples() {
        let zero = vec![c(0.0, 0.0); 4];
        assert!(gle_rhs(&zero, 0.3, 4.0, 3.0, 1.0).unwrap().iter().all(|z| *z == c(0.0, 0.0)));
        let a = c(0.2, 0.1);
        let out = gle_rhs(&[a; 5], 0.3, 4.0, 3.0, 2.0).unwrap();
        assert!(out.iter().all(|z| (z - (0.3 * a - 3.0 * a.norm_sqr() * a)).norm() < 1e-16));
        assert!(gle_rhs(&[a], 0.3, 4.0, 3.0, 2.0).is_err());
    }

    #[test]
    fn reality_examples() {
        let a = vec![c(0.3, -0.2), c(1.0, 2.0)];
        assert_eq!(reality_check(&AmplitudeState::real_sector(a)), 0.0);
        let st = AmplitudeState::new(vec![c(0.0, 1.0)], vec![c(0.0, 1.0)]).unwrap();
        assert_eq!(reality_check(&st), 2.0);
    }
}
