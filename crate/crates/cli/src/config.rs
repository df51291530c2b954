//! TOML run configuration.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use petviashvili::factors::{FactorSpec, GammaSpec};
use petviashvili::problems::{CubicSign, Potential};
use petviashvili::{IterationConfig, StopRule};

use crate::error::CliError;

/// Half-length used when a 1D config omits `l`. The reproduced experiments
/// do not pin the interval down; this is a reproduction approximation.
pub const DEFAULT_LINE_HALF_LENGTH: f64 = 50.0;
pub const DEFAULT_LINE_POINTS: usize = 512;
/// Square `[-32 pi, 32 pi)^2` box for lumps, likewise an approximation.
pub const DEFAULT_PLANE_HALF_LENGTH: f64 = 32.0 * PI;
pub const DEFAULT_PLANE_POINTS: usize = 128;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    #[serde(default)]
    pub factor: FactorBlock,
    #[serde(default)]
    pub iteration: IterationBlock,
    #[serde(default)]
    pub seed: SeedSpec,
    #[serde(default)]
    pub diagnostics: DiagnosticsBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub continuation: Option<ContinuationBlock>,
    #[serde(default)]
    pub output: OutputBlock,
}

/// `l` is the half-length of `[-l, l)`, `m` the node count. `lz`, `mz`
/// default to `l`, `m` on a plane.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub l: Option<f64>,
    pub m: Option<usize>,
    pub lz: Option<f64>,
    pub mz: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    NlsGroundState {
        mu: f64,
        #[serde(default = "sech_squared")]
        potential: Potential,
        #[serde(default)]
        cubic_sign: CubicSign,
        #[serde(default)]
        grid: GridSpec,
    },
    NlsSoliton {
        sigma: f64,
        lambda1: f64,
        lambda2: f64,
        #[serde(default)]
        grid: GridSpec,
    },
    BenjaminLump {
        gamma: f64,
        #[serde(default = "unit_speed")]
        speed: f64,
        #[serde(default)]
        grid: GridSpec,
    },
    /// `L = I`, `N(u) = u` on `dimension` nodes: `S` is the identity.
    Identity { dimension: usize },
}

fn sech_squared() -> Potential {
    Potential::sech_squared()
}

fn unit_speed() -> f64 {
    1.0
}

impl ProblemSpec {
    pub fn family(&self) -> &'static str {
        match self {
            ProblemSpec::NlsGroundState { .. } => "nls_ground_state",
            ProblemSpec::NlsSoliton { .. } => "nls_soliton",
            ProblemSpec::BenjaminLump { .. } => "benjamin_lump",
            ProblemSpec::Identity { .. } => "identity",
        }
    }

    /// Names accepted as a continuation parameter.
    pub fn parameters(&self) -> &'static [&'static str] {
        match self {
            ProblemSpec::NlsGroundState { .. } => &["mu"],
            ProblemSpec::NlsSoliton { .. } => &["sigma", "lambda1", "lambda2"],
            ProblemSpec::BenjaminLump { .. } => &["gamma", "speed"],
            ProblemSpec::Identity { .. } => &[],
        }
    }

    /// Copy with `name` set to `value`.
    pub fn with_parameter(&self, name: &str, value: f64) -> Result<Self, CliError> {
        let mut out = self.clone();
        let slot = match (&mut out, name) {
            (ProblemSpec::NlsGroundState { mu, .. }, "mu") => mu,
            (ProblemSpec::NlsSoliton { sigma, .. }, "sigma") => sigma,
            (ProblemSpec::NlsSoliton { lambda1, .. }, "lambda1") => lambda1,
            (ProblemSpec::NlsSoliton { lambda2, .. }, "lambda2") => lambda2,
            (ProblemSpec::BenjaminLump { gamma, .. }, "gamma") => gamma,
            (ProblemSpec::BenjaminLump { speed, .. }, "speed") => speed,
            _ => {
                return Err(CliError::config(
                    "continuation.parameter",
                    format!(
                        "{} has no parameter '{name}' (expected one of {:?})",
                        self.family(),
                        self.parameters()
                    ),
                ))
            }
        };
        *slot = value;
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GammaValue {
    Value(f64),
    Named(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorBlock {
    /// `petviashvili:g`, `inner:f=<map>:g` or `norm:<r>:g`.
    pub descriptor: String,
    /// Overrides the descriptor's `g`: a number or `"optimal"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<GammaValue>,
}

impl Default for FactorBlock {
    fn default() -> Self {
        Self {
            descriptor: "petviashvili:optimal".into(),
            gamma: None,
        }
    }
}

impl FactorBlock {
    pub fn spec(&self) -> Result<FactorSpec, CliError> {
        let mut spec: FactorSpec = self
            .descriptor
            .parse()
            .map_err(|e| CliError::config("factor.descriptor", e))?;
        match &self.gamma {
            None => {}
            Some(GammaValue::Value(g)) => spec.gamma = GammaSpec::Value(*g),
            Some(GammaValue::Named(s)) if s == "optimal" => spec.gamma = GammaSpec::Optimal,
            Some(GammaValue::Named(s)) => {
                return Err(CliError::config("factor.gamma", format!("expected a number or \"optimal\", got \"{s}\"")))
            }
        }
        Ok(spec)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Stabilized,
    Classical,
    Newton,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IterationBlock {
    #[serde(default)]
    pub method: Method,
    pub max_iterations: Option<usize>,
    pub residual_tolerance: Option<f64>,
    pub factor_tolerance: Option<f64>,
    pub divergence_guard: Option<f64>,
    pub stop_rule: Option<StopRule>,
}

impl IterationBlock {
    pub fn config(&self) -> Result<IterationConfig, CliError> {
        let d = IterationConfig::default();
        let cfg = IterationConfig {
            max_iterations: self.max_iterations.unwrap_or(d.max_iterations),
            residual_tolerance: self.residual_tolerance.unwrap_or(d.residual_tolerance),
            factor_tolerance: self.factor_tolerance.unwrap_or(d.factor_tolerance),
            divergence_guard: self.divergence_guard.unwrap_or(d.divergence_guard),
            stop_rule: self.stop_rule.unwrap_or(d.stop_rule),
            keep_history: false,
        };
        cfg.validate().map_err(|e| CliError::config("iteration", e))?;
        Ok(cfg)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SeedSpec {
    /// `A exp(-|x|^2 / w^2)`, times `x` when antisymmetric.
    Gaussian {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "one")]
        width: f64,
        #[serde(default)]
        antisymmetric: bool,
    },
    /// `U + eps1 i U + eps2 dU/dx` around the exact soliton.
    ExactPerturbed {
        #[serde(default)]
        eps1: f64,
        #[serde(default)]
        eps2: f64,
    },
    /// A `profile.csv` written by an earlier run.
    File { path: PathBuf },
}

fn one() -> f64 {
    1.0
}

impl Default for SeedSpec {
    fn default() -> Self {
        SeedSpec::Gaussian {
            amplitude: 1.0,
            width: 1.0,
            antisymmetric: false,
        }
    }
}

/// Which state the `spectrum` command analyses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateSource {
    /// Solve from the seed first.
    #[default]
    Solve,
    /// Use the seed itself (an exact profile or a loaded file).
    Seed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsBlock {
    /// Number of largest-modulus eigenvalues reported.
    #[serde(default = "six")]
    pub spectrum: usize,
    /// Write `orbitfit.json` after soliton solves.
    #[serde(default)]
    pub orbital: bool,
    #[serde(default)]
    pub state: StateSource,
    /// Tolerance of the spectrum-shift check between `S` and `F'`.
    #[serde(default = "shift_tolerance")]
    pub shift_tolerance: f64,
}

fn six() -> usize {
    6
}

fn shift_tolerance() -> f64 {
    1e-6
}

impl Default for DiagnosticsBlock {
    fn default() -> Self {
        Self {
            spectrum: six(),
            orbital: false,
            state: StateSource::default(),
            shift_tolerance: shift_tolerance(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuationBlock {
    pub parameter: String,
    /// Explicit path values; otherwise `start`, `end`, `step`.
    pub values: Option<Vec<f64>>,
    pub start: Option<f64>,
    pub end: Option<f64>,
    pub step: Option<f64>,
    #[serde(default = "four")]
    pub max_bisections: usize,
    /// Factor descriptors compared at the last path value, each started
    /// from the previous stage.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub compare_factors: Vec<String>,
}

fn four() -> usize {
    4
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    /// Overridden by `--out`.
    pub directory: Option<PathBuf>,
    /// Write X and Z cross sections through the peak of 2D profiles.
    #[serde(default = "yes")]
    pub cross_sections: bool,
    #[serde(default = "yes")]
    pub profile: bool,
}

fn yes() -> bool {
    true
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self {
            directory: None,
            cross_sections: true,
            profile: true,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Checks everything that can be checked without building the problem.
    pub fn validate(&self) -> Result<(), CliError> {
        self.factor.spec()?;
        self.iteration.config()?;
        if self.diagnostics.spectrum == 0 {
            return Err(CliError::config("diagnostics.spectrum", "must be at least 1"));
        }
        if !(self.diagnostics.shift_tolerance > 0.0) {
            return Err(CliError::config("diagnostics.shift_tolerance", "must be positive"));
        }
        if matches!(self.seed, SeedSpec::ExactPerturbed { .. }) && !matches!(self.problem, ProblemSpec::NlsSoliton { .. }) {
            return Err(CliError::config("seed.kind", "exact_perturbed needs an nls_soliton problem"));
        }
        if let Some(c) = &self.continuation {
            self.problem.with_parameter(&c.parameter, 0.0)?;
            for d in &c.compare_factors {
                d.parse::<FactorSpec>()
                    .map_err(|e| CliError::config("continuation.compare_factors", e))?;
            }
        }
        Ok(())
    }
}
