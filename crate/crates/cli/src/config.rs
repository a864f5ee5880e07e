//! Scenario configuration files. Unknown keys are rejected everywhere.

use std::path::{Path, PathBuf};

use evorod::energetics::NaturalVariant;
use evorod::torsion::{TorsionParams, Waveform};
use serde::Deserialize;

pub const DEFAULT_RAMP: f64 = 1e-3;

#[derive(Debug, Deserialize)]
#[serde(tag = "scenario", rename_all = "snake_case")]
pub enum Config {
    Relaxation(Quasistatic),
    Creep(Quasistatic),
    CreepMuZero(Quasistatic),
    Dynamic(Dynamic),
    MaximizerCheck(MaximizerCheck),
    Counterexample(Counterexample),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Quasistatic {
    pub params: QuasistaticParams,
    pub input: Input,
    pub numerics: Numerics,
    #[serde(default)]
    pub output: Output,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dynamic {
    pub params: DynamicParams,
    pub variant: Variant,
    pub input: Input,
    pub numerics: Numerics,
    #[serde(default)]
    pub output: Output,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaximizerCheck {
    #[serde(default = "default_instances")]
    pub instances: usize,
    #[serde(default = "default_max_nodes")]
    pub nodes: Vec<usize>,
    #[serde(default = "default_variants")]
    pub variants: Vec<Variant>,
    #[serde(default = "default_condition")]
    pub max_condition: f64,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default)]
    pub output: Output,
    #[serde(default)]
    pub seed: u64,
}

/// Pure twist `u(s) = twist_root + twist_slope · s` with a natural state held
/// uniform at zero.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Counterexample {
    #[serde(default = "one")]
    pub a33: f64,
    #[serde(default = "one")]
    pub m_d33: f64,
    #[serde(default = "one")]
    pub length: f64,
    #[serde(default = "default_counter_nodes")]
    pub nodes: usize,
    #[serde(default = "one")]
    pub twist_root: f64,
    #[serde(default = "default_slope")]
    pub twist_slope: f64,
    #[serde(default)]
    pub output: Output,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuasistaticParams {
    pub mu: f64,
    pub mu_d: f64,
    pub alpha: f64,
    pub alpha_d: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicParams {
    pub nu: f64,
    pub mu: f64,
    pub mu_d: f64,
    pub alpha: f64,
    pub alpha_d: f64,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Local,
    Uniform,
}

impl Variant {
    pub fn natural(self) -> NaturalVariant {
        match self {
            Variant::Local => NaturalVariant::Local,
            Variant::Uniform => NaturalVariant::Uniform,
        }
    }
}

/// Boundary input. `step` is the ideal step for the quasi-static scenarios
/// and a smoothed step of length `numerics.ramp_duration` for the dynamic one.
#[derive(Debug, Deserialize)]
#[serde(tag = "waveform", rename_all = "snake_case", deny_unknown_fields)]
pub enum Input {
    Step { amplitude: f64 },
    SmoothedStep { amplitude: f64 },
    Tabulated { times: Vec<f64>, values: Vec<f64> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Numerics {
    pub t_end: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_grid_nodes")]
    pub grid_nodes: usize,
    pub dt_initial: Option<f64>,
    /// Relative tolerance of the integrators.
    pub tol: Option<f64>,
    #[serde(default = "default_ramp")]
    pub ramp_duration: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    pub path: Option<PathBuf>,
    #[serde(default = "default_stride")]
    pub sample_stride: usize,
}

impl Default for Output {
    fn default() -> Self {
        Self { path: None, sample_stride: default_stride() }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn output(&self) -> &Output {
        match self {
            Config::Relaxation(c) | Config::Creep(c) | Config::CreepMuZero(c) => &c.output,
            Config::Dynamic(c) => &c.output,
            Config::MaximizerCheck(c) => &c.output,
            Config::Counterexample(c) => &c.output,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Config::Relaxation(_) => "relaxation",
            Config::Creep(_) => "creep",
            Config::CreepMuZero(_) => "creep_mu_zero",
            Config::Dynamic(_) => "dynamic",
            Config::MaximizerCheck(_) => "maximizer_check",
            Config::Counterexample(_) => "counterexample",
        }
    }
}

impl QuasistaticParams {
    pub fn build(&self) -> evorod::Result<TorsionParams<f64>> {
        TorsionParams::quasistatic(self.mu, self.mu_d, self.alpha, self.alpha_d)
    }
}

impl DynamicParams {
    pub fn build(&self) -> evorod::Result<TorsionParams<f64>> {
        TorsionParams::new(self.nu, self.mu, self.mu_d, self.alpha, self.alpha_d)
    }
}

impl Input {
    /// `ideal_step` selects the closed-form step over a smoothed one.
    pub fn waveform(&self, ramp: f64, ideal_step: bool) -> evorod::Result<Waveform<f64>> {
        match self {
            Input::Step { amplitude } if ideal_step => Ok(Waveform::Step { amplitude: *amplitude }),
            Input::Step { amplitude } | Input::SmoothedStep { amplitude } => Waveform::smoothed_step(*amplitude, ramp),
            Input::Tabulated { times, values } => Waveform::tabulated(times.clone(), values.clone()),
        }
    }
}

impl Numerics {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(format!("numerics.t_end must be positive, got {}", self.t_end));
        }
        if self.samples < 2 {
            return Err(format!("numerics.samples must be at least 2, got {}", self.samples));
        }
        if let Some(tol) = self.tol {
            if !(tol > 0.0) {
                return Err(format!("numerics.tol must be positive, got {tol}"));
            }
        }
        Ok(())
    }
}

fn one() -> f64 {
    1.0
}
fn default_slope() -> f64 {
    -3.0
}
fn default_counter_nodes() -> usize {
    101
}
fn default_instances() -> usize {
    20
}
fn default_max_nodes() -> Vec<usize> {
    vec![4, 8]
}
fn default_variants() -> Vec<Variant> {
    vec![Variant::Local, Variant::Uniform]
}
fn default_condition() -> f64 {
    1e3
}
fn default_restarts() -> usize {
    8
}
fn default_iterations() -> usize {
    4000
}
fn default_samples() -> usize {
    1001
}
fn default_grid_nodes() -> usize {
    64
}
fn default_ramp() -> f64 {
    DEFAULT_RAMP
}
fn default_stride() -> usize {
    1
}
