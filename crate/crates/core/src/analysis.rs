//! Closed-form predictions and the lattice-versus-oracle comparison.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::direct::spectral::{fit_slope, SpectralStepper};
use crate::error::{Error, Result};
use crate::field::AmplitudeState;
use crate::forcing::{BoundaryForcing, SignChoice, WallValues};
use crate::model::{run_model, wall_element_rhs};
use crate::params::ModelParams;
use crate::subgrid::{extract_amplitudes, render_field};

/// `r - (1 - k^2)^2`.
pub fn she_growth_rate(k: f64, r: f64) -> f64 {
    crate::direct::spectral::linear_symbol(r, k)
}

/// Growth rate of the lattice mode `a_j = exp(i kappa j h)` under the
/// linearised interior equation: `r + (4 g^2 / h^2)(2 cos(kappa h) - 2)`.
pub fn lattice_dispersion(kappa: f64, params: &ModelParams) -> f64 {
    let h = params.h;
    params.r + 4.0 * params.gamma * params.gamma / (h * h) * (2.0 * (kappa * h).cos() - 2.0)
}

/// Which part of `a_1` a rate applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Component {
    Real,
    Imaginary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryRates {
    /// `r - 8/h^2`.
    pub fast: f64,
    /// `r`.
    pub slow: f64,
    pub fast_component: Component,
}

/// Linear rates of the wall element when its neighbour carries the same
/// amplitude and the field is real. The upper family damps `Re(a_1)`, so
/// rolls lock to `sin x` at the wall; the lower family damps `Im(a_1)`.
pub fn boundary_mode_rates(params: &ModelParams, sign: SignChoice) -> BoundaryRates {
    let h = params.h;
    BoundaryRates {
        fast: params.r - 8.0 * params.gamma * params.gamma / (h * h),
        slow: params.r,
        fast_component: match sign {
            SignChoice::Upper => Component::Real,
            SignChoice::Lower => Component::Imaginary,
        },
    }
}

/// Predicted steady `Re(a_1)` under constant even-derivative wall data:
/// `-h (alpha + beta) / 8`. Valid while `8/h^2` dominates both `r` and the
/// cubic term.
pub fn boundary_equilibrium(params: &ModelParams, alpha: f64, beta: f64) -> f64 {
    -params.h * (alpha + beta) / 8.0
}

/// Jacobian of `(Re a_1', Im a_1')` with respect to `(Re a_1, Im a_1)` at
/// zero, under `a_2 = a_1`, `b = conj(a)` and no wall data, by central
/// differences. Returns the matrix and its eigenvalues, ascending by real part.
pub fn boundary_linearisation(params: &ModelParams, sign: SignChoice) -> ([[f64; 2]; 2], [Complex64; 2]) {
    let eps = 1e-7;
    let rate = |a: Complex64| {
        let (da, _) = wall_element_rhs(a, a.conj(), a, a.conj(), params, WallValues::default(), sign);
        da
    };
    let mut jac = [[0.0; 2]; 2];
    for (col, dir) in [Complex64::new(eps, 0.0), Complex64::new(0.0, eps)].into_iter().enumerate() {
        let d = (rate(dir) - rate(-dir)) / (2.0 * eps);
        jac[0][col] = d.re;
        jac[1][col] = d.im;
    }
    let trace = jac[0][0] + jac[1][1];
    let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
    let disc = Complex64::new(0.25 * trace * trace - det, 0.0).sqrt();
    let (lo, hi) = (0.5 * trace - disc, 0.5 * trace + disc);
    let eig = if lo.re <= hi.re { [lo, hi] } else { [hi, lo] };
    (jac, eig)
}

/// Amplitude scale of an initial profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Amplitude {
    Absolute(f64),
    /// A multiple of `sqrt(r/3)`.
    EquilibriumFraction(f64),
}

impl Amplitude {
    pub fn resolve(self, r: f64) -> f64 {
        match self {
            Amplitude::Absolute(v) => v,
            Amplitude::EquilibriumFraction(f) => f * (r.max(0.0) / 3.0).sqrt(),
        }
    }
}

/// Initial lattice, always in the real sector `b = conj(a)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialProfile {
    Uniform { amplitude: Amplitude, phase: f64 },
    /// `a_j = A (1 + depth cos(2 pi mode j / N))`, `j` counted from one.
    Modulated { amplitude: Amplitude, depth: f64, mode: usize },
    Explicit { a: Vec<Complex64> },
}

impl InitialProfile {
    pub fn build(&self, n: usize, r: f64) -> Result<AmplitudeState> {
        let a = match self {
            InitialProfile::Uniform { amplitude, phase } => {
                vec![Complex64::from_polar(amplitude.resolve(r), *phase); n]
            }
            InitialProfile::Modulated { amplitude, depth, mode } => {
                let scale = amplitude.resolve(r);
                (1..=n)
                    .map(|j| {
                        let arg = TAU * (*mode as f64) * j as f64 / n as f64;
                        Complex64::new(scale * (1.0 + depth * arg.cos()), 0.0)
                    })
                    .collect()
            }
            InitialProfile::Explicit { a } => {
                if a.len() != n {
                    return Err(Error::SizeMismatch {
                        expected: n,
                        found: a.len(),
                    });
                }
                a.clone()
            }
        };
        Ok(AmplitudeState::real_sector(a))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Horizon {
    Absolute(f64),
    /// `c / r`.
    PerRate(f64),
}

impl Horizon {
    pub fn resolve(self, r: f64) -> Result<f64> {
        let t = match self {
            Horizon::Absolute(t) => t,
            Horizon::PerRate(c) => c / r,
        };
        if t.is_finite() && t >= 0.0 {
            Ok(t)
        } else {
            Err(Error::InvalidParameter {
                name: "t_end",
                reason: format!("{self:?} gives {t} at r = {r}"),
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareConfig {
    pub params: ModelParams,
    pub initial: InitialProfile,
    pub t_end: Horizon,
    /// Spacing of the recorded samples.
    pub sample_interval: f64,
    pub oracle_dt: f64,
    pub model_dt: f64,
    pub dealias: bool,
    /// Values of `r` for a convergence study; each rung reuses the rest of
    /// the configuration.
    pub r_ladder: Option<Vec<f64>>,
}

impl CompareConfig {
    pub fn new(params: ModelParams, initial: InitialProfile, t_end: Horizon) -> Self {
        CompareConfig {
            params,
            initial,
            t_end,
            sample_interval: 1.0,
            oracle_dt: 0.1,
            model_dt: 0.1,
            dealias: true,
            r_ladder: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderRung {
    pub r: f64,
    pub terminal_sup_error: f64,
    /// `terminal_sup_error / sqrt(r/3)`.
    pub normalised_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub times: Vec<f64>,
    pub model_amplitudes: Vec<Vec<Complex64>>,
    pub oracle_amplitudes: Vec<Vec<Complex64>>,
    /// `max_j |a_model - a_oracle|` at each time.
    pub sup_error: Vec<f64>,
    pub rungs: Vec<LadderRung>,
    /// Least-squares slope of `log(normalised_error)` against `log r`.
    pub convergence_slope: Option<f64>,
    pub warnings: Vec<String>,
    pub metadata: CompareConfig,
}

/// Runs the spectral oracle and the lattice model from the same initial
/// amplitudes on a periodic domain and records both amplitude histories.
///
/// The oracle starts from the lattice reconstruction at the configured
/// coupling, and oracle amplitudes are read back as element averages.
pub fn compare_model_vs_direct(config: &CompareConfig) -> Result<ComparisonReport> {
    let mut report = single_comparison(config)?;
    if let Some(ladder) = &config.r_ladder {
        report.rungs = run_ladder(config, ladder)?;
        let log_r: Vec<f64> = report.rungs.iter().map(|g| g.r.ln()).collect();
        let log_e: Vec<f64> = report.rungs.iter().map(|g| g.normalised_error.ln()).collect();
        if report.rungs.len() >= 2 && log_e.iter().all(|v| v.is_finite()) {
            report.convergence_slope = Some(fit_slope(&log_r, &log_e));
        } else {
            report.warnings.push("ladder errors not positive; slope undefined".into());
        }
    }
    Ok(report)
}

fn run_ladder(config: &CompareConfig, ladder: &[f64]) -> Result<Vec<LadderRung>> {
    if ladder.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::InvalidParameter {
            name: "r_ladder",
            reason: "every rung needs r > 0".into(),
        });
    }
    let results: Vec<Result<LadderRung>> = std::thread::scope(|scope| {
        let handles: Vec<_> = ladder
            .iter()
            .map(|&r| {
                scope.spawn(move || {
                    let rung = CompareConfig {
                        params: config.params.with_r(r),
                        r_ladder: None,
                        ..config.clone()
                    };
                    let report = single_comparison(&rung)?;
                    let terminal = *report.sup_error.last().expect("at least one sample");
                    Ok(LadderRung {
                        r,
                        terminal_sup_error: terminal,
                        normalised_error: terminal / (r / 3.0).sqrt(),
                    })
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("ladder worker panicked")).collect()
    });
    results.into_iter().collect()
}

fn sup_difference(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn single_comparison(config: &CompareConfig) -> Result<ComparisonReport> {
    let params = config.params;
    params.validate()?;
    if !(config.sample_interval > 0.0 && config.oracle_dt > 0.0 && config.model_dt > 0.0) {
        return Err(Error::InvalidParameter {
            name: "sample_interval",
            reason: "sampling and step sizes must be positive".into(),
        });
    }
    let t_end = config.t_end.resolve(params.r)?;
    let forcing = BoundaryForcing::periodic();
    let initial = config.initial.build(params.n_elements, params.r)?;

    let samples = ((t_end / config.sample_interval).ceil() as usize).max(1);
    let interval = t_end / samples as f64;
    let substeps = (interval / config.oracle_dt).ceil().max(1.0);

    let mut grid = render_field(&initial, &params, &forcing)?;
    let mut oracle = if interval > 0.0 {
        Some(SpectralStepper::for_grid(&grid, &params, interval / substeps, config.dealias)?)
    } else {
        None
    };
    let validity = 2.0 * (params.r.max(0.0) / 3.0).sqrt();
    let mut model = initial.clone();
    let mut report = ComparisonReport {
        times: Vec::with_capacity(samples + 1),
        model_amplitudes: Vec::with_capacity(samples + 1),
        oracle_amplitudes: Vec::with_capacity(samples + 1),
        sup_error: Vec::with_capacity(samples + 1),
        rungs: Vec::new(),
        convergence_slope: None,
        warnings: Vec::new(),
        metadata: config.clone(),
    };
    for i in 0..=samples {
        let t = i as f64 * interval;
        if i > 0 {
            if let Some(stepper) = oracle.as_mut() {
                for _ in 0..substeps as usize {
                    stepper.step(&mut grid)?;
                }
            }
            grid.t = t;
            model = run_model(&model, &params, &forcing, t, config.model_dt, usize::MAX)?.last().clone();
        }
        let extracted = extract_amplitudes(&grid, &params)?;
        let peak = extracted.a.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if peak > validity && report.warnings.is_empty() {
            report.warnings.push(format!(
                "oracle amplitude {peak:.3e} exceeds 2 sqrt(r/3) = {validity:.3e} at t = {t}; outside the truncation range"
            ));
        }
        report.times.push(t);
        report.sup_error.push(sup_difference(&model.a, &extracted.a));
        report.model_amplitudes.push(model.a.clone());
        report.oracle_amplitudes.push(extracted.a);
        if interval == 0.0 {
            break;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::make_params;
    use std::f64::consts::PI;

    #[test]
    fn growth_rate_examples() {
        assert_eq!(she_growth_rate(1.0, 0.1), 0.1);
        assert_eq!(she_growth_rate(0.0, 0.0), -1.0);
        assert!((she_growth_rate(1.2, 0.1) + 0.0936).abs() < 1e-12);
        for k in [0.3, 1.0, 1.7] {
            assert_eq!(she_growth_rate(k, 0.2), she_growth_rate(-k, 0.2));
        }
    }

    #[test]
    fn lattice_dispersion_examples() {
        let params = make_params(0.07, 1.0, 1, 8, 16).unwrap();
        let h = params.h;
        assert_eq!(lattice_dispersion(0.0, &params), 0.07);
        assert!((lattice_dispersion(PI / h, &params) - (0.07 - 16.0 / (h * h))).abs() < 1e-15);
        for kappa in [0.01, 0.2, 0.45] {
            let shifted = lattice_dispersion(kappa + TAU / h, &params);
            assert!((shifted - lattice_dispersion(kappa, &params)).abs() < 1e-14);
            assert!(lattice_dispersion(kappa, &params) <= params.r);
        }
        // Quartic remainder against the continuum r - 4 kappa^2 stays bounded.
        for kappa in [1e-3, 3e-3, 1e-2, 3e-2] {
            let remainder = (lattice_dispersion(kappa, &params) - (params.r - 4.0 * kappa * kappa)) / kappa.powi(4);
            assert!((remainder - h * h / 3.0).abs() < 1e-2 * h * h, "{remainder}");
        }
    }

    #[test]
    fn mode_rate_examples() {
        let params = make_params(0.0, 1.0, 1, 4, 16).unwrap();
        let rates = boundary_mode_rates(&params, SignChoice::Upper);
        assert!((rates.fast + 0.2026).abs() < 1e-4);
        assert_eq!(rates.fast_component, Component::Real);
        let hot = params.with_r(0.1);
        assert_eq!(boundary_mode_rates(&hot, SignChoice::Lower).slow, 0.1);
        assert_eq!(boundary_mode_rates(&hot, SignChoice::Lower).fast_component, Component::Imaginary);
        let wide = make_params(0.0, 1.0, 2, 4, 16).unwrap();
        let ratio = boundary_mode_rates(&params, SignChoice::Upper).fast / boundary_mode_rates(&wide, SignChoice::Upper).fast;
        assert!((ratio - 4.0).abs() < 1e-12);
        assert!(rates.fast < rates.slow);
    }

    #[test]
    fn equilibrium_examples() {
        let params = make_params(0.0, 1.0, 1, 4, 16).unwrap();
        assert!((boundary_equilibrium(&params, 0.04, 0.06) + 0.0785).abs() < 1e-4);
        assert_eq!(boundary_equilibrium(&params, 0.0, 0.0), -0.0);
    }

    #[test]
    fn linearisation_separates_components() {
        let params = make_params(0.03, 1.0, 1, 4, 16).unwrap();
        for sign in [SignChoice::Upper, SignChoice::Lower] {
            let (jac, eig) = boundary_linearisation(&params, sign);
            assert!(jac[0][1].abs() < 1e-10 && jac[1][0].abs() < 1e-10);
            let rates = boundary_mode_rates(&params, sign);
            assert!((eig[0].re - rates.fast).abs() < 1e-10);
            assert!((eig[1].re - rates.slow).abs() < 1e-10);
            let fast_diag = if sign == SignChoice::Upper { jac[0][0] } else { jac[1][1] };
            assert!((fast_diag - rates.fast).abs() < 1e-10);
        }
    }

    #[test]
    fn profiles_build() {
        let state = InitialProfile::Modulated {
            amplitude: Amplitude::EquilibriumFraction(1.0),
            depth: 0.2,
            mode: 1,
        }
        .build(4, 0.03)
        .unwrap();
        assert!((state.a[3].re - 0.1 * 1.2).abs() < 1e-15);
        assert!((state.a[1].re - 0.1 * 0.8).abs() < 1e-15);
        assert_eq!(state.b[0], state.a[0].conj());
        assert!(InitialProfile::Explicit { a: vec![] }.build(2, 0.0).is_err());
        assert!(Horizon::PerRate(10.0).resolve(0.0).is_err());
    }

    #[test]
    fn zero_state_compares_exactly() {
        let params = make_params(0.02, 1.0, 1, 4, 16).unwrap();
        let initial = InitialProfile::Uniform {
            amplitude: Amplitude::Absolute(0.0),
            phase: 0.0,
        };
        let report = compare_model_vs_direct(&CompareConfig::new(params, initial, Horizon::Absolute(5.0))).unwrap();
        assert_eq!(report.times.len(), 6);
        assert!(report.sup_error.iter().all(|&e| e == 0.0));
    }

    #[test]
    fn neutral_uncoupled_systems_agree() {
        let params = make_params(0.0, 0.0, 1, 4, 16).unwrap();
        let initial = InitialProfile::Uniform {
            amplitude: Amplitude::Absolute(1e-4),
            phase: 0.3,
        };
        let report = compare_model_vs_direct(&CompareConfig::new(params, initial, Horizon::Absolute(10.0))).unwrap();
        assert!(report.sup_error.iter().all(|&e| e <= 1e-8), "{:?}", report.sup_error);
        // r = 0 leaves no room for any amplitude in the truncation range.
        assert!(!report.warnings.is_empty());
    }
}
