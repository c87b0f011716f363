//! Run configuration: a TOML file with `model`, `bath`, `initial`, `grid`
//! and `run` sections. Command-line flags override the scalar run fields.
//!
//! ```toml
//! [model]
//! alpha = 1.0
//! beta = 0.0
//! modes = [{ omega = 1.0, g = [0.4, 0.0], cutoff = 32 }]
//!
//! [bath]
//! kind = "vacuum"          # vacuum | fock | coherent | thermal
//! # occupations = [1]      # fock: one level per mode
//! # amplitudes = [[0.3, 0.0]]  # coherent: one [re, im] per mode
//! # theta = 2.0            # thermal: inverse temperature
//!
//! [initial]
//! bloch = [1.0, 0.0, 0.0]
//!
//! [grid]
//! t_max = 20.0
//! steps = 200
//!
//! [run]
//! method = "closed_form"   # closed_form | oracle | both (default: closed_form if beta = 0)
//! seed = 42
//! tolerance = 1e-10
//! norm = "frobenius"       # frobenius | spectral
//! random_sets = 8
//! convergence_doublings = 1
//! out = "out"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use spinboson_core::dynamics::uniform_grid;
use spinboson_core::{BathKind, FockSpace, Method, Mode, ModelParams, Norm, QubitState, C64};

use crate::error::CliError;

/// A coupling written either as a real number or as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexValue {
    pub fn to_c64(self) -> C64 {
        match self {
            ComplexValue::Real(x) => C64::new(x, 0.0),
            ComplexValue::Pair([re, im]) => C64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSection {
    pub omega: f64,
    pub g: ComplexValue,
    pub cutoff: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub alpha: f64,
    #[serde(default)]
    pub beta: f64,
    pub modes: Vec<ModeSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BathKindName {
    Vacuum,
    Fock,
    Coherent,
    Thermal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathSection {
    pub kind: BathKindName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub occupations: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<ComplexValue>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

impl Default for BathSection {
    fn default() -> Self {
        Self {
            kind: BathKindName::Vacuum,
            occupations: None,
            amplitudes: None,
            theta: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    pub bloch: [f64; 3],
}

impl Default for InitialSection {
    fn default() -> Self {
        Self { bloch: [0.0, 0.0, 1.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub t_max: f64,
    pub steps: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { t_max: 20.0, steps: 200 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum MethodChoice {
    #[value(name = "closed_form")]
    ClosedForm,
    Oracle,
    Both,
}

impl MethodChoice {
    pub fn methods(self) -> Vec<Method> {
        match self {
            MethodChoice::ClosedForm => vec![Method::ClosedForm],
            MethodChoice::Oracle => vec![Method::Oracle],
            MethodChoice::Both => vec![Method::ClosedForm, Method::Oracle],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MethodChoice::ClosedForm => "closed_form",
            MethodChoice::Oracle => "oracle",
            MethodChoice::Both => "both",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormChoice {
    #[default]
    Frobenius,
    Spectral,
}

impl From<NormChoice> for Norm {
    fn from(n: NormChoice) -> Self {
        match n {
            NormChoice::Frobenius => Norm::Frobenius,
            NormChoice::Spectral => Norm::Spectral,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<MethodChoice>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub norm: NormChoice,
    #[serde(default = "default_random_sets")]
    pub random_sets: usize,
    #[serde(default = "default_doublings")]
    pub convergence_doublings: usize,
    #[serde(default = "default_out")]
    pub out: PathBuf,
}

fn default_seed() -> u64 {
    42
}
fn default_tolerance() -> f64 {
    1e-10
}
fn default_random_sets() -> usize {
    8
}
fn default_doublings() -> usize {
    1
}
fn default_out() -> PathBuf {
    PathBuf::from("out")
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            method: None,
            seed: default_seed(),
            tolerance: default_tolerance(),
            norm: NormChoice::default(),
            random_sets: default_random_sets(),
            convergence_doublings: default_doublings(),
            out: default_out(),
        }
    }
}

/// The file as written, before validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub model: ModelSection,
    #[serde(default)]
    pub bath: BathSection,
    #[serde(default)]
    pub initial: InitialSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub run: RunSection,
}

impl Default for ConfigFile {
    /// β=0, α=1, one mode with ω=1, g=0.4, d=32.
    fn default() -> Self {
        Self {
            model: ModelSection {
                alpha: 1.0,
                beta: 0.0,
                modes: vec![ModeSection {
                    omega: 1.0,
                    g: ComplexValue::Real(0.4),
                    cutoff: 32,
                }],
            },
            bath: BathSection::default(),
            initial: InitialSection::default(),
            grid: GridSection::default(),
            run: RunSection::default(),
        }
    }
}

impl ConfigFile {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml_str(&text)
    }
}

/// Flag values that replace the corresponding `run` fields.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub method: Option<MethodChoice>,
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
    pub out: Option<PathBuf>,
}

/// Validated configuration ready to run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub file: ConfigFile,
    pub params: ModelParams,
    pub bath: BathKind,
    pub initial: QubitState,
    pub times: Vec<f64>,
    pub method: MethodChoice,
    pub seed: u64,
    pub tolerance: f64,
    pub norm: Norm,
    pub random_sets: usize,
    pub convergence_doublings: usize,
    pub out: PathBuf,
}

impl RunConfig {
    pub fn from_file(mut file: ConfigFile, overrides: &Overrides) -> Result<Self, CliError> {
        if let Some(m) = overrides.method {
            file.run.method = Some(m);
        }
        if let Some(s) = overrides.seed {
            file.run.seed = s;
        }
        if let Some(t) = overrides.tolerance {
            file.run.tolerance = t;
        }
        if let Some(o) = &overrides.out {
            file.run.out = o.clone();
        }

        let cutoffs: Vec<usize> = file.model.modes.iter().map(|m| m.cutoff).collect();
        let space = FockSpace::new(cutoffs)?;
        let modes = file
            .model
            .modes
            .iter()
            .map(|m| Mode::new(m.omega, m.g.to_c64()))
            .collect();
        let params = ModelParams::new(file.model.alpha, file.model.beta, modes, space)?;

        let bath = match file.bath.kind {
            BathKindName::Vacuum => BathKind::Vacuum,
            BathKindName::Fock => BathKind::Fock(
                file.bath
                    .occupations
                    .clone()
                    .ok_or_else(|| CliError::Config("bath.kind = \"fock\" needs bath.occupations".into()))?,
            ),
            BathKindName::Coherent => BathKind::Coherent(
                file.bath
                    .amplitudes
                    .as_ref()
                    .ok_or_else(|| CliError::Config("bath.kind = \"coherent\" needs bath.amplitudes".into()))?
                    .iter()
                    .map(|a| a.to_c64())
                    .collect(),
            ),
            BathKindName::Thermal => BathKind::Thermal(
                file.bath
                    .theta
                    .ok_or_else(|| CliError::Config("bath.kind = \"thermal\" needs bath.theta".into()))?,
            ),
        };
        // Builds once so that bad occupations or amplitudes fail before any run.
        bath.build(&params)?;

        let initial = QubitState::from_bloch(file.initial.bloch)?;
        let times = uniform_grid(file.grid.t_max, file.grid.steps)?;

        let tolerance = file.run.tolerance;
        if !tolerance.is_finite() || tolerance <= 0.0 {
            return Err(CliError::Config(format!("run.tolerance must be > 0, got {tolerance}")));
        }
        let method = file.run.method.unwrap_or(if params.beta() == 0.0 {
            MethodChoice::ClosedForm
        } else {
            MethodChoice::Oracle
        });

        Ok(Self {
            params,
            bath,
            initial,
            times,
            method,
            seed: file.run.seed,
            tolerance,
            norm: file.run.norm.into(),
            random_sets: file.run.random_sets,
            convergence_doublings: file.run.convergence_doublings,
            out: file.run.out.clone(),
            file,
        })
    }

    pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<Self, CliError> {
        let file = match path {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        Self::from_file(file, overrides)
    }

    /// The closed form refuses `β ≠ 0`; checked before any computation.
    pub fn require_closed_form_allowed(&self) -> Result<(), CliError> {
        if self.method != MethodChoice::Oracle && self.params.beta() != 0.0 {
            return Err(spinboson_core::Error::ClosedFormRequiresZeroBeta(self.params.beta()).into());
        }
        Ok(())
    }
}
