//! Finite-difference integration between two walls.
//!
//! Nodes sit at `x0 + i dx`, `i = 0..=n`, both walls included. Walls are
//! imposed through ghost nodes:
//!
//! * even data pins the wall node to `(-1)^p alpha` and sets the first ghost
//!   from the centred second difference, `u_{-1} = 2 u_0 - u_1 + dx^2 (-1)^p beta`;
//! * odd data leaves the wall node free and sets two ghosts from the centred
//!   first and third differences,
//!   `u_{-1} = u_1 - 2 dx (-1)^p alpha`,
//!   `u_{-2} = u_2 - 2 u_1 + 2 u_{-1} - 2 dx^3 (-1)^p beta`.
//!
//! The right wall uses the same formulas in the mirrored frame. The linear
//! operator is then a pentadiagonal matrix plus a wall-driven affine term.
//!
//! Time stepping is Strang splitting: exact half steps of `u' = -u^3`
//! around an L-stable two-stage SDIRK step of the linear part.

use super::banded::{Banded, BandedLu, HALF_BAND};
use super::{SolverConfig, DEFAULT_C_STAB};
use crate::error::{Error, Result};
use crate::field::FieldGrid;
use crate::forcing::{BoundaryForcing, ForcingKind, WallValues};
use crate::params::ModelParams;

/// Diagonal coefficient of Alexander's two-stage SDIRK method.
const SDIRK_GAMMA: f64 = 1.0 - std::f64::consts::FRAC_1_SQRT_2;

pub struct BoundedStepper {
    nodes: usize,
    dx: f64,
    r: f64,
    dt: f64,
    forcing: BoundaryForcing,
    pinned: bool,
    operator: Banded,
    implicit: BandedLu,
}

impl BoundedStepper {
    pub fn new(grid: &FieldGrid, params: &ModelParams, forcing: &BoundaryForcing, config: &SolverConfig) -> Result<Self> {
        if grid.periodic {
            return Err(Error::NotBounded);
        }
        if forcing.is_periodic() {
            return Err(Error::ForcingKind {
                found: forcing.kind.name(),
                reason: "bounded stepping needs EvenGiven or OddGiven walls",
            });
        }
        forcing.validate(params)?;
        let limit = config.c_stab * grid.dx * grid.dx;
        if !(config.dt > 0.0 && config.dt <= limit) {
            return Err(Error::UnstableTimeStep { dt: config.dt, limit });
        }
        if grid.len() < 2 * HALF_BAND + 3 {
            return Err(Error::InvalidParameter {
                name: "grid",
                reason: format!("{} nodes are too few for the wall stencils", grid.len()),
            });
        }
        let pinned = forcing.kind == ForcingKind::EvenGiven;
        let mut stepper = BoundedStepper {
            nodes: grid.len(),
            dx: grid.dx,
            r: params.r,
            dt: config.dt,
            forcing: forcing.clone(),
            pinned,
            operator: Banded::zeros(0),
            implicit: Banded::zeros(1).shifted(1.0, 0.0).factor()?,
        };
        stepper.operator = stepper.assemble();
        stepper.implicit = stepper.operator.shifted(1.0, -SDIRK_GAMMA * stepper.dt).factor()?;
        Ok(stepper)
    }

    fn unknowns(&self) -> std::ops::Range<usize> {
        if self.pinned {
            1..self.nodes - 1
        } else {
            0..self.nodes
        }
    }

    /// `(r - 1) u - 2 u_xx - u_xxxx` at every unknown node, for the node
    /// values `u` (walls included) and wall data `left`, `right`.
    fn apply(&self, u: &[f64], left: WallValues, right: WallValues) -> Vec<f64> {
        let n = self.nodes;
        let s = self.forcing.parity_factor;
        let dx = self.dx;
        let mut ext = vec![0.0; n + 4];
        ext[2..n + 2].copy_from_slice(u);
        // Ghosts on one side, written for the left wall; `node(k)` is the
        // k-th node counted inward and `ghost(k)` the k-th ghost outward.
        let fill = |ext: &mut [f64], node: &dyn Fn(usize) -> usize, ghost: &dyn Fn(usize) -> usize, wall: WallValues| {
            if self.pinned {
                ext[node(0)] = s * wall.alpha;
                ext[ghost(1)] = 2.0 * ext[node(0)] - ext[node(1)] + dx * dx * s * wall.beta;
            } else {
                ext[ghost(1)] = ext[node(1)] - 2.0 * dx * s * wall.alpha;
                ext[ghost(2)] =
                    ext[node(2)] - 2.0 * ext[node(1)] + 2.0 * ext[ghost(1)] - 2.0 * dx * dx * dx * s * wall.beta;
            }
        };
        fill(&mut ext, &|k| 2 + k, &|k| 2 - k, left);
        fill(&mut ext, &|k| n + 1 - k, &|k| n + 1 + k, right);

        let (dx2, dx4) = (dx * dx, dx * dx * dx * dx);
        self.unknowns()
            .map(|i| {
                let c = i + 2;
                let d2 = (ext[c + 1] - 2.0 * ext[c] + ext[c - 1]) / dx2;
                let d4 = (ext[c + 2] - 4.0 * ext[c + 1] + 6.0 * ext[c] - 4.0 * ext[c - 1] + ext[c - 2]) / dx4;
                (self.r - 1.0) * ext[c] - 2.0 * d2 - d4
            })
            .collect()
    }

    /// Builds the banded matrix of the homogeneous operator by probing with
    /// combs of period five, each of which touches every row exactly once.
    fn assemble(&self) -> Banded {
        let unknowns = self.unknowns();
        let offset = unknowns.start;
        let count = unknowns.len();
        let width = 2 * HALF_BAND + 1;
        let zero = WallValues::default();
        let mut matrix = Banded::zeros(count);
        for c in 0..width {
            let mut probe = vec![0.0; self.nodes];
            for j in (c..count).step_by(width) {
                probe[j + offset] = 1.0;
            }
            let y = self.apply(&probe, zero, zero);
            for (i, value) in y.into_iter().enumerate() {
                let lo = i.saturating_sub(HALF_BAND);
                let hi = (i + HALF_BAND).min(count - 1);
                if let Some(j) = (lo..=hi).find(|j| j % width == c) {
                    matrix.set(i, j, value);
                }
            }
        }
        matrix
    }

    /// Wall-driven part of the linear operator at time `t`.
    fn affine(&self, t: f64) -> Vec<f64> {
        let mut zero = vec![0.0; self.nodes];
        let (left, right) = (self.forcing.left_values(t), self.forcing.right_values(t));
        if self.pinned {
            zero[0] = self.forcing.parity_factor * left.alpha;
            zero[self.nodes - 1] = self.forcing.parity_factor * right.alpha;
        }
        self.apply(&zero, left, right)
    }

    fn cubic_half_step(&self, u: &mut [f64]) {
        let tau = 0.5 * self.dt;
        for v in u.iter_mut() {
            *v /= (1.0 + 2.0 * *v * *v * tau).sqrt();
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advances `grid` in place by one step.
    pub fn step(&mut self, grid: &mut FieldGrid) -> Result<()> {
        if grid.len() != self.nodes || grid.periodic {
            return Err(Error::SizeMismatch {
                expected: self.nodes,
                found: grid.len(),
            });
        }
        let range = self.unknowns();
        let t = grid.t;
        let dt = self.dt;
        let gdt = SDIRK_GAMMA * dt;

        let mut u = grid.u[range.clone()].to_vec();
        self.cubic_half_step(&mut u);

        let g1 = self.affine(t + gdt);
        let mut y1: Vec<f64> = u.iter().zip(&g1).map(|(v, g)| v + gdt * g).collect();
        self.implicit.solve(&mut y1);
        let k1: Vec<f64> = y1.iter().zip(&u).map(|(y, v)| (y - v) / gdt).collect();
        let g2 = self.affine(t + dt);
        let mut y2: Vec<f64> = (0..u.len())
            .map(|i| u[i] + (1.0 - SDIRK_GAMMA) * dt * k1[i] + gdt * g2[i])
            .collect();
        self.implicit.solve(&mut y2);

        self.cubic_half_step(&mut y2);
        grid.t = t + dt;
        if y2.iter().any(|v| !v.is_finite()) {
            return Err(Error::Diverged { t: grid.t });
        }
        grid.u[range].copy_from_slice(&y2);
        if self.pinned {
            let s = self.forcing.parity_factor;
            grid.u[0] = s * self.forcing.left_values(grid.t).alpha;
            grid.u[self.nodes - 1] = s * self.forcing.right_values(grid.t).alpha;
        }
        Ok(())
    }

    pub fn advance_to(&mut self, grid: &mut FieldGrid, t_end: f64) -> Result<()> {
        while grid.t < t_end - 1e-9 * self.dt {
            self.step(grid)?;
        }
        Ok(())
    }

    /// Homogeneous linear operator applied to the unknown nodes of `u`.
    #[cfg(test)]
    fn operator_times(&self, u: &[f64]) -> Vec<f64> {
        self.operator.mul_vec(&u[self.unknowns()])
    }
}

/// One bounded step of size `dt` with the default stability constant.
pub fn step_bounded(grid: &FieldGrid, params: &ModelParams, forcing: &BoundaryForcing, dt: f64) -> Result<FieldGrid> {
    let config = SolverConfig {
        dt,
        c_stab: DEFAULT_C_STAB,
        scheme: super::Scheme::BoundedImex,
        ..SolverConfig::default()
    };
    let mut stepper = BoundedStepper::new(grid, params, forcing, &config)?;
    let mut out = grid.clone();
    stepper.step(&mut out)?;
    Ok(out)
}
