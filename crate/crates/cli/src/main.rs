//! `shpattern`: runs one experiment per invocation and writes CSV tables plus
//! a `manifest.json` into the output directory.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod error;
mod experiments;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use config::{Experiment, ExperimentConfig};
use error::CliError;

/// Holistic lattice model of the Swift-Hohenberg equation and its reference solvers.
///
/// Every flag mirrors a field of the JSON configuration (`--config`); flags
/// win over the file. Defaults are listed in brackets.
#[derive(Parser, Debug)]
#[command(name = "shpattern", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Growth rates of single Fourier modes from the spectral solver against r - (1 - k^2)^2.
    Dispersion(Flags),
    /// Lattice model against the spectral solver on a periodic domain.
    Compare(Flags),
    /// Phase selection of the wall element under homogeneous wall data.
    BoundarySelect(Flags),
    /// Relaxation of the wall element under constant wall data.
    BoundaryEquilibrium(Flags),
    /// Subgrid field of the wall element for unit wall data.
    BoundaryProfiles(Flags),
    /// Field history from the reference solver (spectral if periodic, finite differences otherwise).
    SimulateDirect(Flags),
    /// Amplitude history from the lattice model.
    SimulateModel(Flags),
    /// Runs the experiment named in the configuration.
    Run {
        /// Experiment to run, overriding the file.
        #[arg(long, value_enum)]
        experiment: Option<Experiment>,
        #[command(flatten)]
        flags: Flags,
    },
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// JSON configuration file; unknown keys are rejected.
    #[arg(long)]
    config: Option<PathBuf>,

    /// params.r: bifurcation parameter [0.1]
    #[arg(long, allow_hyphen_values = true)]
    r: Option<f64>,
    /// params.gamma: inter-element coupling in [0, 1] [1]
    #[arg(long)]
    gamma: Option<f64>,
    /// params.p: roll periods per element [1]
    #[arg(long)]
    p: Option<u32>,
    /// params.n_elements [8]
    #[arg(long)]
    n_elements: Option<usize>,
    /// params.m_samples: field samples per element, a power of two >= 16 [32]
    #[arg(long)]
    m_samples: Option<usize>,

    /// solver.dt [0.05]
    #[arg(long)]
    dt: Option<f64>,
    /// solver.t_end [10]
    #[arg(long)]
    t_end: Option<f64>,
    /// solver.dealias: 2/3-rule in the spectral solver [true]
    #[arg(long)]
    dealias: Option<bool>,
    /// solver.scheme: spectral-etd or bounded-imex [spectral-etd]
    #[arg(long)]
    scheme: Option<String>,
    /// solver.c_stab: bounded runs need dt <= c_stab dx^2 [1]
    #[arg(long)]
    c_stab: Option<f64>,

    /// forcing.kind: periodic, even-given or odd-given [periodic]
    #[arg(long)]
    kind: Option<String>,
    /// forcing.alpha as a constant; use the config file for time signals [0]
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// forcing.beta as a constant [0]
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    /// forcing.right_alpha as a constant [0]
    #[arg(long, allow_hyphen_values = true)]
    right_alpha: Option<f64>,
    /// forcing.right_beta as a constant [0]
    #[arg(long, allow_hyphen_values = true)]
    right_beta: Option<f64>,
    /// forcing.parity_factor: checked against (-1)^p [unset]
    #[arg(long, allow_hyphen_values = true)]
    parity_factor: Option<f64>,

    /// initial.profile: uniform, modulated or random [modulated]
    #[arg(long)]
    profile: Option<String>,
    /// initial.amplitude [1]
    #[arg(long)]
    amplitude: Option<f64>,
    /// initial.relative: amplitude in units of sqrt(r/3) [true]
    #[arg(long)]
    relative: Option<bool>,
    /// initial.phase (uniform profile) [0]
    #[arg(long, allow_hyphen_values = true)]
    phase: Option<f64>,
    /// initial.depth (modulated profile) [0.2]
    #[arg(long, allow_hyphen_values = true)]
    depth: Option<f64>,
    /// initial.mode (modulated profile) [1]
    #[arg(long)]
    mode: Option<usize>,

    /// sweep.k_min [0.5]
    #[arg(long)]
    k_min: Option<f64>,
    /// sweep.k_max [1.5]
    #[arg(long)]
    k_max: Option<f64>,
    /// sweep.k_steps [21]
    #[arg(long)]
    k_steps: Option<usize>,
    /// sweep.eps0: amplitude of the measured mode [1e-6]
    #[arg(long)]
    eps0: Option<f64>,
    /// sweep.max_elements: largest domain tried per wavenumber [256]
    #[arg(long)]
    max_elements: Option<usize>,

    /// sign: upper or lower wall family [upper]
    #[arg(long)]
    sign: Option<String>,
    /// r_ladder: comma-separated r values for a convergence study [unset]
    #[arg(long, value_delimiter = ',')]
    r_ladder: Option<Vec<f64>>,
    /// horizon_per_rate: run for this many multiples of 1/r instead of t_end [unset]
    #[arg(long)]
    horizon_per_rate: Option<f64>,
    /// sample_interval: time between recorded samples [1]
    #[arg(long)]
    sample_interval: Option<f64>,
    /// points: sample intervals across the element for profiles [64]
    #[arg(long)]
    points: Option<usize>,
    /// drift_threshold: warn above this |second time derivative| of wall data [0.01]
    #[arg(long)]
    drift_threshold: Option<f64>,
    /// model_only: skip the reference run in boundary-select [false]
    #[arg(long)]
    model_only: Option<bool>,
    /// output_dir [out]
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// seed for random initial profiles [0]
    #[arg(long)]
    seed: Option<u64>,
}

impl Flags {
    fn overrides(&self) -> Vec<(&'static str, Value)> {
        let constant = |v: f64| json!({"type": "constant", "value": v});
        let entries: Vec<(&'static str, Option<Value>)> = vec![
            ("params.r", self.r.map(Value::from)),
            ("params.gamma", self.gamma.map(Value::from)),
            ("params.p", self.p.map(Value::from)),
            ("params.n_elements", self.n_elements.map(Value::from)),
            ("params.m_samples", self.m_samples.map(Value::from)),
            ("solver.dt", self.dt.map(Value::from)),
            ("solver.t_end", self.t_end.map(Value::from)),
            ("solver.dealias", self.dealias.map(Value::from)),
            ("solver.scheme", self.scheme.clone().map(Value::from)),
            ("solver.c_stab", self.c_stab.map(Value::from)),
            ("forcing.kind", self.kind.clone().map(Value::from)),
            ("forcing.alpha", self.alpha.map(constant)),
            ("forcing.beta", self.beta.map(constant)),
            ("forcing.right_alpha", self.right_alpha.map(constant)),
            ("forcing.right_beta", self.right_beta.map(constant)),
            ("forcing.parity_factor", self.parity_factor.map(Value::from)),
            ("initial.profile", self.profile.clone().map(Value::from)),
            ("initial.amplitude", self.amplitude.map(Value::from)),
            ("initial.relative", self.relative.map(Value::from)),
            ("initial.phase", self.phase.map(Value::from)),
            ("initial.depth", self.depth.map(Value::from)),
            ("initial.mode", self.mode.map(Value::from)),
            ("sweep.k_min", self.k_min.map(Value::from)),
            ("sweep.k_max", self.k_max.map(Value::from)),
            ("sweep.k_steps", self.k_steps.map(Value::from)),
            ("sweep.eps0", self.eps0.map(Value::from)),
            ("sweep.max_elements", self.max_elements.map(Value::from)),
            ("sign", self.sign.clone().map(Value::from)),
            ("r_ladder", self.r_ladder.clone().map(Value::from)),
            ("horizon_per_rate", self.horizon_per_rate.map(Value::from)),
            ("sample_interval", self.sample_interval.map(Value::from)),
            ("points", self.points.map(Value::from)),
            ("drift_threshold", self.drift_threshold.map(Value::from)),
            ("model_only", self.model_only.map(Value::from)),
            (
                "output_dir",
                self.output_dir.as_ref().map(|p| Value::from(p.to_string_lossy().into_owned())),
            ),
            ("seed", self.seed.map(Value::from)),
        ];
        entries.into_iter().filter_map(|(k, v)| v.map(|v| (k, v))).collect()
    }
}

fn execute(command: Command) -> Result<(), CliError> {
    let (experiment, flags) = match command {
        Command::Dispersion(f) => (Some(Experiment::Dispersion), f),
        Command::Compare(f) => (Some(Experiment::Compare), f),
        Command::BoundarySelect(f) => (Some(Experiment::BoundarySelect), f),
        Command::BoundaryEquilibrium(f) => (Some(Experiment::BoundaryEquilibrium), f),
        Command::BoundaryProfiles(f) => (Some(Experiment::BoundaryProfiles), f),
        Command::SimulateDirect(f) => (Some(Experiment::SimulateDirect), f),
        Command::SimulateModel(f) => (Some(Experiment::SimulateModel), f),
        Command::Run { experiment, flags } => (experiment, flags),
    };
    let mut overrides = flags.overrides();
    if let Some(e) = experiment {
        overrides.push(("experiment", Value::from(e.name())));
    }
    let config = ExperimentConfig::load(flags.config.as_deref(), &overrides)?;

    let started = chrono::Utc::now();
    let clock = Instant::now();
    let run = experiments::run(&config)?;
    let written = output::write_run(&config, &run, started, clock.elapsed().as_secs_f64())?;
    for path in written {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
