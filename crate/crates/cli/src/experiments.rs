//! One function per experiment. Each returns tables; writing them is left to
//! the caller so the runs stay free of file-system concerns.

use log::{info, warn};
use num_complex::Complex64;
use serde_json::Value;
use shpattern_core::analysis::{boundary_equilibrium, compare_model_vs_direct, she_growth_rate, CompareConfig, Horizon};
use shpattern_core::direct::{measure_growth_rate, BoundedStepper, Scheme, SolverConfig, SpectralStepper};
use shpattern_core::field::FieldGrid;
use shpattern_core::model::{max_stable_dt, run_model};
use shpattern_core::subgrid::{boundary_profiles, extract_amplitudes, render_field};
use shpattern_core::{make_params, AmplitudeState, BoundaryForcing, ModelParams, SignChoice};

use crate::config::{Experiment, ExperimentConfig};
use crate::error::CliError;

pub struct Table {
    /// Appended to the file stem; `None` for the primary table.
    pub suffix: Option<&'static str>,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(suffix: Option<&'static str>, header: &[&'static str]) -> Self {
        Table {
            suffix,
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

#[derive(Default)]
pub struct RunOutput {
    pub tables: Vec<Table>,
    /// Written next to the tables as JSON.
    pub report: Option<Value>,
    pub warnings: Vec<String>,
}

impl RunOutput {
    fn warn(&mut self, message: String) {
        warn!("{message}");
        self.warnings.push(message);
    }
}

fn num(v: f64) -> String {
    v.to_string()
}

/// `n` equal intervals covering `[0, t_end]`, each no longer than `interval`.
fn sample_times(t_end: f64, interval: f64) -> Vec<f64> {
    if t_end == 0.0 {
        return vec![0.0];
    }
    let n = (t_end / interval).ceil().max(1.0) as usize;
    (0..=n).map(|i| t_end * i as f64 / n as f64).collect()
}

/// Largest step no longer than `dt` that divides `span`.
fn fitted_step(span: f64, dt: f64) -> f64 {
    if span <= 0.0 {
        return dt;
    }
    span / (span / dt).ceil().max(1.0)
}

pub fn run(config: &ExperimentConfig) -> Result<RunOutput, CliError> {
    info!("running {}", config.experiment.name());
    match config.experiment {
        Experiment::Dispersion => dispersion(config),
        Experiment::Compare => compare(config),
        Experiment::BoundarySelect => boundary_select(config),
        Experiment::BoundaryEquilibrium => boundary_equilibrium_run(config),
        Experiment::BoundaryProfiles => profiles(config),
        Experiment::SimulateDirect => simulate_direct(config),
        Experiment::SimulateModel => simulate_model(config),
    }
}

fn check_drift(config: &ExperimentConfig, forcing: &BoundaryForcing, out: &mut RunOutput) {
    if forcing.is_periodic() {
        return;
    }
    let drift = forcing.max_second_derivative(0.0, config.t_end(), 0.1);
    if drift > config.drift_threshold {
        out.warn(format!(
            "wall data second time derivative reaches {drift:.3e} (threshold {:.3e}); the lattice model assumes slowly varying forcing",
            config.drift_threshold
        ));
    }
}

/// Smallest element count for which `k` is a whole number of domain
/// wavelengths and stays below the dealiasing cut.
fn commensurate_elements(k: f64, base: &ModelParams, max_elements: usize) -> Option<usize> {
    (2..=max_elements.max(2)).find(|&n| {
        let index = k * (n as f64) * f64::from(base.p);
        (index - index.round()).abs() < 1e-9 && 3.0 * index.abs() < (n * base.m_samples) as f64
    })
}

fn dispersion(config: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let base = config.model_params()?;
    let sweep = &config.sweep;
    let ks: Vec<f64> = (0..sweep.k_steps)
        .map(|i| {
            if sweep.k_steps == 1 {
                sweep.k_min
            } else {
                sweep.k_min + (sweep.k_max - sweep.k_min) * i as f64 / (sweep.k_steps - 1) as f64
            }
        })
        .collect();
    let t_final = config.t_end();
    let measured: Vec<Result<Option<f64>, CliError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = ks
            .iter()
            .map(|&k| {
                scope.spawn(move || {
                    let Some(n) = commensurate_elements(k, &base, sweep.max_elements) else {
                        return Ok(None);
                    };
                    let params = make_params(base.r, base.gamma, base.p, n, base.m_samples)?;
                    Ok(Some(measure_growth_rate(&params, k, sweep.eps0, t_final)?))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    let mut out = RunOutput::default();
    let mut table = Table::new(None, &["k", "lambda_theory", "lambda_measured"]);
    for (k, m) in ks.iter().zip(measured) {
        let value = match m? {
            Some(v) => num(v),
            None => {
                out.warn(format!("k = {k} fits no domain of up to {} elements; left blank", sweep.max_elements));
                String::new()
            }
        };
        table.push(vec![num(*k), num(she_growth_rate(*k, base.r)), value]);
    }
    out.tables.push(table);
    Ok(out)
}

fn compare(config: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let params = config.model_params()?;
    let compare = CompareConfig {
        params,
        initial: config.initial_profile()?,
        t_end: match config.horizon_per_rate {
            Some(c) => Horizon::PerRate(c),
            None => Horizon::Absolute(config.solver.t_end),
        },
        sample_interval: config.sample_interval,
        oracle_dt: config.solver.dt,
        model_dt: config.solver.dt.min(max_stable_dt(&params)),
        dealias: config.solver.dealias,
        r_ladder: config.r_ladder.clone(),
    };
    let report = compare_model_vs_direct(&compare)?;
    let mut out = RunOutput::default();
    for w in &report.warnings {
        out.warn(w.clone());
    }
    let mut table = Table::new(
        None,
        &["time", "element", "model_re", "model_im", "oracle_re", "oracle_im", "sup_error"],
    );
    for (i, &t) in report.times.iter().enumerate() {
        for (j, (m, o)) in report.model_amplitudes[i].iter().zip(&report.oracle_amplitudes[i]).enumerate() {
            table.push(vec![
                num(t),
                (j + 1).to_string(),
                num(m.re),
                num(m.im),
                num(o.re),
                num(o.im),
                num(report.sup_error[i]),
            ]);
        }
    }
    out.tables.push(table);
    if !report.rungs.is_empty() {
        let mut ladder = Table::new(Some("ladder"), &["r", "terminal_sup_error", "normalised_error"]);
        for g in &report.rungs {
            ladder.push(vec![num(g.r), num(g.terminal_sup_error), num(g.normalised_error)]);
        }
        out.tables.push(ladder);
    }
    out.report = Some(serde_json::to_value(&report)?);
    Ok(out)
}

/// Integrates the lattice and reports the state at each of `times`.
fn model_samples(
    initial: &AmplitudeState,
    params: &ModelParams,
    forcing: &BoundaryForcing,
    times: &[f64],
    dt: f64,
) -> Result<Vec<AmplitudeState>, CliError> {
    let dt = dt.min(max_stable_dt(params));
    let mut state = initial.clone();
    let mut samples = vec![state.clone()];
    for &t in &times[1..] {
        state = run_model(&state, params, forcing, t, dt, usize::MAX)?.last().clone();
        samples.push(state.clone());
    }
    Ok(samples)
}

enum Oracle {
    Spectral(SpectralStepper),
    Bounded(BoundedStepper),
}

impl Oracle {
    fn new(
        grid: &FieldGrid,
        params: &ModelParams,
        forcing: &BoundaryForcing,
        solver: &SolverConfig,
        interval: f64,
    ) -> Result<Self, CliError> {
        if forcing.is_periodic() {
            let dt = fitted_step(interval, solver.dt);
            return Ok(Oracle::Spectral(SpectralStepper::for_grid(grid, params, dt, solver.dealias)?));
        }
        let limit = solver.c_stab * grid.dx * grid.dx;
        let dt = fitted_step(interval, solver.dt.min(limit));
        if dt < solver.dt {
            info!("bounded step reduced to {dt:.4e} by the dx^2 limit");
        }
        let config = SolverConfig {
            dt,
            scheme: Scheme::BoundedImex,
            ..*solver
        };
        Ok(Oracle::Bounded(BoundedStepper::new(grid, params, forcing, &config)?))
    }

    fn advance_to(&mut self, grid: &mut FieldGrid, t: f64) -> Result<(), CliError> {
        match self {
            Oracle::Spectral(s) => {
                s.advance_to(grid, t)?;
            }
            Oracle::Bounded(s) => s.advance_to(grid, t)?,
        }
        Ok(())
    }
}

fn locked_fraction(a: Complex64, sign: SignChoice) -> f64 {
    let part = match sign {
        SignChoice::Upper => a.re,
        SignChoice::Lower => a.im,
    };
    if a.norm() == 0.0 {
        0.0
    } else {
        part.abs() / a.norm()
    }
}

fn boundary_select(config: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let params = config.model_params()?;
    let forcing = config.boundary_forcing(&params)?;
    let initial = config.initial_profile()?.build(params.n_elements, params.r)?;
    let times = sample_times(config.t_end(), config.sample_interval);
    let mut out = RunOutput::default();
    check_drift(config, &forcing, &mut out);
    let model = model_samples(&initial, &params, &forcing, &times, config.solver.dt)?;

    let mut header = vec!["t", "model_re_a1", "model_im_a1", "model_locked_fraction"];
    let oracle = if config.model_only {
        None
    } else {
        header.extend(["oracle_re_a1", "oracle_im_a1", "oracle_locked_fraction"]);
        let mut grid = render_field(&initial, &params, &forcing)?;
        let interval = times.get(1).copied().unwrap_or(0.0);
        let mut stepper = Oracle::new(&grid, &params, &forcing, &config.solver, interval)?;
        let mut series = Vec::with_capacity(times.len());
        for &t in &times {
            stepper.advance_to(&mut grid, t)?;
            series.push(extract_amplitudes(&grid, &params)?.a[0]);
        }
        Some(series)
    };
    let mut table = Table::new(None, &header);
    for (i, &t) in times.iter().enumerate() {
        let a = model[i].a[0];
        let mut row = vec![num(t), num(a.re), num(a.im), num(locked_fraction(a, config.sign))];
        if let Some(series) = &oracle {
            let o = series[i];
            row.extend([num(o.re), num(o.im), num(locked_fraction(o, config.sign))]);
        }
        table.push(row);
    }
    out.tables.push(table);
    Ok(out)
}

fn boundary_equilibrium_run(config: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let params = config.model_params()?;
    let forcing = config.boundary_forcing(&params)?;
    let mut out = RunOutput::default();
    if config.sign == SignChoice::Lower {
        out.warn("the closed-form equilibrium is derived for the upper family".into());
    }
    check_drift(config, &forcing, &mut out);
    let initial = AmplitudeState::zeros(params.n_elements);
    let times = sample_times(config.t_end(), config.sample_interval);
    let model = model_samples(&initial, &params, &forcing, &times, config.solver.dt)?;
    let mut table = Table::new(None, &["t", "re_a1", "im_a1", "predicted_re_a1"]);
    for (state, &t) in model.iter().zip(&times) {
        let wall = forcing.left_values(t);
        let a = state.a[0];
        table.push(vec![
            num(t),
            num(a.re),
            num(a.im),
            num(boundary_equilibrium(&params, wall.alpha, wall.beta)),
        ]);
    }
    out.tables.push(table);
    Ok(out)
}

fn profiles(config: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let params = config.model_params()?;
    let xs: Vec<f64> = (0..=config.points)
        .map(|i| -0.5 * params.h + params.h * i as f64 / config.points as f64)
        .collect();
    let profile = boundary_profiles(&params, config.sign, &xs)?;
    let mut table = Table::new(
        None,
        &["x", "alpha_profile", "beta_profile", "alpha_profile_xx", "beta_profile_xx"],
    );
    for i in 0..xs.len() {
        table.push(vec![
            num(profile.x[i]),
            num(profile.alpha_profile[i]),
            num(profile.beta_profile[i]),
            num(profile.alpha_profile_xx[i]),
            num(profile.beta_profile_xx[i]),
        ]);
    }
    Ok(RunOutput {
        tables: vec![table],
        ..RunOutput::default()
    })
}

fn amplitude_rows(table: &mut Table, t: f64, state: &AmplitudeState) {
    for (j, (a, b)) in state.a.iter().zip(&state.b).enumerate() {
        table.push(vec![
            num(t),
            (j + 1).to_string(),
            num(a.re),
            num(a.im),
            num(b.re),
            num(b.im),
        ]);
    }
}

const AMPLITUDE_HEADER: [&str; 6] = ["t", "element", "re_a", "im_a", "re_b", "im_b"];

fn simulate_direct(config: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let params = config.model_params()?;
    let forcing = config.forcing_as(config.forcing.kind, &params)?;
    let initial = config.initial_profile()?.build(params.n_elements, params.r)?;
    let times = sample_times(config.t_end(), config.sample_interval);
    let mut out = RunOutput::default();
    check_drift(config, &forcing, &mut out);
    let mut grid = render_field(&initial, &params, &forcing)?;
    let interval = times.get(1).copied().unwrap_or(0.0);
    let mut stepper = Oracle::new(&grid, &params, &forcing, &config.solver, interval)?;
    let mut field = Table::new(None, &["t", "x", "u"]);
    let mut amplitudes = Table::new(Some("amplitudes"), &AMPLITUDE_HEADER);
    for &t in &times {
        stepper.advance_to(&mut grid, t)?;
        for (i, u) in grid.u.iter().enumerate() {
            field.push(vec![num(t), num(grid.x(i)), num(*u)]);
        }
        amplitude_rows(&mut amplitudes, t, &extract_amplitudes(&grid, &params)?);
    }
    out.tables.extend([field, amplitudes]);
    Ok(out)
}

fn simulate_model(config: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let params = config.model_params()?;
    let forcing = config.forcing_as(config.forcing.kind, &params)?;
    let initial = config.initial_profile()?.build(params.n_elements, params.r)?;
    let times = sample_times(config.t_end(), config.sample_interval);
    let mut out = RunOutput::default();
    check_drift(config, &forcing, &mut out);
    let model = model_samples(&initial, &params, &forcing, &times, config.solver.dt)?;
    let mut table = Table::new(None, &AMPLITUDE_HEADER);
    for (state, &t) in model.iter().zip(&times) {
        amplitude_rows(&mut table, t, state);
    }
    out.tables.push(table);
    Ok(out)
}
