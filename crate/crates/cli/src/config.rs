//! Experiment configuration: a JSON document overlaid with command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use shpattern_core::analysis::{Amplitude, InitialProfile};
use shpattern_core::direct::SolverConfig;
use shpattern_core::{make_params, BoundaryForcing, ForcingKind, ModelParams, SignChoice, Signal};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Dispersion,
    Compare,
    BoundarySelect,
    BoundaryEquilibrium,
    BoundaryProfiles,
    SimulateDirect,
    SimulateModel,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Dispersion => "dispersion",
            Experiment::Compare => "compare",
            Experiment::BoundarySelect => "boundary-select",
            Experiment::BoundaryEquilibrium => "boundary-equilibrium",
            Experiment::BoundaryProfiles => "boundary-profiles",
            Experiment::SimulateDirect => "simulate-direct",
            Experiment::SimulateModel => "simulate-model",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsSection {
    pub r: f64,
    pub gamma: f64,
    pub p: u32,
    pub n_elements: usize,
    pub m_samples: usize,
}

impl Default for ParamsSection {
    fn default() -> Self {
        ParamsSection {
            r: 0.1,
            gamma: 1.0,
            p: 1,
            n_elements: 8,
            m_samples: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForcingSection {
    pub kind: ForcingKind,
    pub alpha: Signal,
    pub beta: Signal,
    pub right_alpha: Signal,
    pub right_beta: Signal,
    /// Must equal `(-1)^p` when given.
    pub parity_factor: Option<f64>,
}

impl Default for ForcingSection {
    fn default() -> Self {
        ForcingSection {
            kind: ForcingKind::Periodic,
            alpha: Signal::zero(),
            beta: Signal::zero(),
            right_alpha: Signal::zero(),
            right_beta: Signal::zero(),
            parity_factor: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileKind {
    Uniform,
    Modulated,
    /// Seeded uniform draws in the disc of the given radius.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialSection {
    pub profile: ProfileKind,
    pub amplitude: f64,
    /// Read `amplitude` as a multiple of `sqrt(r/3)`.
    pub relative: bool,
    pub phase: f64,
    pub depth: f64,
    pub mode: usize,
}

impl Default for InitialSection {
    fn default() -> Self {
        InitialSection {
            profile: ProfileKind::Modulated,
            amplitude: 1.0,
            relative: true,
            phase: 0.0,
            depth: 0.2,
            mode: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub k_min: f64,
    pub k_max: f64,
    pub k_steps: usize,
    /// Amplitude of the measured mode.
    pub eps0: f64,
    /// Largest element count tried when matching `k` to the domain.
    pub max_elements: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            k_min: 0.5,
            k_max: 1.5,
            k_steps: 21,
            eps0: 1e-6,
            max_elements: 256,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub params: ParamsSection,
    pub solver: SolverConfig,
    pub forcing: ForcingSection,
    pub initial: InitialSection,
    pub sweep: SweepSection,
    /// Wall family for the boundary experiments.
    pub sign: SignChoice,
    /// Convergence ladder for `compare`.
    pub r_ladder: Option<Vec<f64>>,
    /// When set, the run length is `horizon_per_rate / r` instead of `solver.t_end`.
    pub horizon_per_rate: Option<f64>,
    /// Time between recorded samples.
    pub sample_interval: f64,
    /// Sample intervals per element for `boundary-profiles`.
    pub points: usize,
    /// Warn when the wall data's second time derivative exceeds this.
    pub drift_threshold: f64,
    /// Skip the bounded reference run in `boundary-select`.
    pub model_only: bool,
    pub output_dir: PathBuf,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: Experiment::Dispersion,
            params: ParamsSection::default(),
            solver: SolverConfig::default(),
            forcing: ForcingSection::default(),
            initial: InitialSection::default(),
            sweep: SweepSection::default(),
            sign: SignChoice::Upper,
            r_ladder: None,
            horizon_per_rate: None,
            sample_interval: 1.0,
            points: 64,
            drift_threshold: 1e-2,
            model_only: false,
            output_dir: PathBuf::from("out"),
            seed: 0,
        }
    }
}

impl ExperimentConfig {
    /// Reads `path` (if any), applies `overrides` (dotted paths to JSON
    /// values) and validates the result.
    pub fn load(path: Option<&Path>, overrides: &[(&str, Value)]) -> Result<Self, CliError> {
        let mut doc = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
                serde_json::from_str::<Value>(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
            }
            None => Value::Object(Map::new()),
        };
        if !doc.is_object() {
            return Err(CliError::Config("configuration must be a JSON object".into()));
        }
        for (key, value) in overrides {
            set_path(&mut doc, key, value.clone())?;
        }
        let config: ExperimentConfig = serde_json::from_value(doc).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn model_params(&self) -> Result<ModelParams, CliError> {
        let p = &self.params;
        Ok(make_params(p.r, p.gamma, p.p, p.n_elements, p.m_samples)?)
    }

    pub fn t_end(&self) -> f64 {
        match self.horizon_per_rate {
            Some(c) => c / self.params.r,
            None => self.solver.t_end,
        }
    }

    /// Wall data with the kind forced to `kind`.
    pub fn forcing_as(&self, kind: ForcingKind, params: &ModelParams) -> Result<BoundaryForcing, CliError> {
        let f = &self.forcing;
        let forcing = if kind == ForcingKind::Periodic {
            BoundaryForcing::periodic()
        } else {
            BoundaryForcing::left(kind, f.alpha.clone(), f.beta.clone(), params)
                .with_right(f.right_alpha.clone(), f.right_beta.clone())
        };
        if let Some(parity) = f.parity_factor {
            if parity != params.parity() {
                return Err(CliError::Config(format!(
                    "forcing.parity_factor {parity} does not match (-1)^p = {}",
                    params.parity()
                )));
            }
        }
        forcing.validate(params)?;
        Ok(forcing)
    }

    /// Wall data for the boundary experiments, where `sign` picks the kind.
    pub fn boundary_forcing(&self, params: &ModelParams) -> Result<BoundaryForcing, CliError> {
        let kind = self.sign.kind();
        if self.forcing.kind != ForcingKind::Periodic && self.forcing.kind != kind {
            return Err(CliError::Config(format!(
                "forcing.kind {} conflicts with sign {:?}",
                self.forcing.kind.name(),
                self.sign
            )));
        }
        self.forcing_as(kind, params)
    }

    pub fn initial_profile(&self) -> Result<InitialProfile, CliError> {
        let i = &self.initial;
        let amplitude = if i.relative {
            Amplitude::EquilibriumFraction(i.amplitude)
        } else {
            Amplitude::Absolute(i.amplitude)
        };
        Ok(match i.profile {
            ProfileKind::Uniform => InitialProfile::Uniform {
                amplitude,
                phase: i.phase,
            },
            ProfileKind::Modulated => InitialProfile::Modulated {
                amplitude,
                depth: i.depth,
                mode: i.mode,
            },
            ProfileKind::Random => {
                use rand::{Rng, SeedableRng};
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(self.seed);
                let radius = amplitude.resolve(self.params.r);
                let a = (0..self.params.n_elements)
                    .map(|_| {
                        let rho = radius * rng.gen::<f64>().sqrt();
                        num_complex::Complex64::from_polar(rho, rng.gen_range(0.0..std::f64::consts::TAU))
                    })
                    .collect();
                InitialProfile::Explicit { a }
            }
        })
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |name: &str, why: &str| Err(CliError::Config(format!("{name}: {why}")));
        self.model_params()?;
        if !(self.sample_interval > 0.0) {
            return bad("sample_interval", "must be positive");
        }
        if !(self.t_end() >= 0.0 && self.t_end().is_finite()) {
            return bad("solver.t_end", "run length must be finite and non-negative");
        }
        if self.sweep.k_steps == 0 || !(self.sweep.k_max >= self.sweep.k_min) {
            return bad("sweep", "need k_steps >= 1 and k_max >= k_min");
        }
        if self.points < 2 {
            return bad("points", "need at least 2");
        }
        if !self.initial.amplitude.is_finite() || self.initial.amplitude < 0.0 {
            return bad("initial.amplitude", "must be finite and non-negative");
        }
        Ok(())
    }
}

fn set_path(doc: &mut Value, dotted: &str, value: Value) -> Result<(), CliError> {
    let mut node = doc;
    let mut parts = dotted.split('.').peekable();
    while let Some(part) = parts.next() {
        let map = node
            .as_object_mut()
            .ok_or_else(|| CliError::Config(format!("cannot override {dotted}: parent is not an object")))?;
        if parts.peek().is_none() {
            map.insert(part.to_string(), value);
            return Ok(());
        }
        node = map.entry(part.to_string()).or_insert_with(|| Value::Object(Map::new()));
    }
    Ok(())
}
