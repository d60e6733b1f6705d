//! Problem configuration file schema.
//!
//! Every PDE coefficient is a list of expressions, one per power of `t`
//! (normalized Taylor coefficients). Vector-valued data is a list with one
//! expression per component; a bare string is accepted for scalars.

use std::fmt;
use std::path::Path;

use serde::Deserialize;
use taylor_ibvp::dataprep::BumpParams;
use taylor_ibvp::Domain;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Class {
    Parabolic,
    ParabolicSystem,
    ParabolicNonlinear,
    HyperbolicSystem,
    Plate,
    Maxwell,
}

impl Class {
    pub fn name(self) -> &'static str {
        match self {
            Class::Parabolic => "parabolic",
            Class::ParabolicSystem => "parabolic_system",
            Class::ParabolicNonlinear => "parabolic_nonlinear",
            Class::HyperbolicSystem => "hyperbolic_system",
            Class::Plate => "plate",
            Class::Maxwell => "maxwell",
        }
    }
}

/// One expression or one per component (or per t-order, depending on use).
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Exprs {
    One(String),
    Many(Vec<String>),
}

impl Exprs {
    pub fn as_slice(&self) -> &[String] {
        match self {
            Exprs::One(s) => std::slice::from_ref(s),
            Exprs::Many(v) => v,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub class: Class,
    pub horizon: f64,
    pub snapshots: Option<Vec<f64>>,
    pub domain: Domain,
    pub grid: GridConfig,
    pub bump: Option<BumpParams>,
    #[serde(default)]
    pub truncation: TruncationConfig,
    #[serde(default)]
    pub data: DataConfig,
    pub parabolic: Option<ParabolicConfig>,
    pub nonlinear: Option<NonlinearConfig>,
    pub system: Option<SystemConfig>,
    pub plate: Option<PlateConfig>,
    pub maxwell: Option<MaxwellConfig>,
    pub oracle: Option<OracleSection>,
    pub study: Option<StudyConfig>,
    pub manufacture: Option<ManufactureConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub counts: Vec<usize>,
    #[serde(default = "default_stencil")]
    pub stencil_order: u32,
    /// Defaults to the domain's bounding box.
    pub lower: Option<Vec<f64>>,
    pub upper: Option<Vec<f64>>,
}

fn default_stencil() -> u32 {
    4
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TruncationMode {
    Fixed,
    #[default]
    Adaptive,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationConfig {
    #[serde(default)]
    pub mode: TruncationMode,
    /// Fixed mode.
    pub order: Option<usize>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_max_order")]
    pub max_order: usize,
}

fn default_tolerance() -> f64 {
    1e-10
}

fn default_max_order() -> usize {
    200
}

impl Default for TruncationConfig {
    fn default() -> Self {
        Self { mode: TruncationMode::Adaptive, order: None, tolerance: default_tolerance(), max_order: default_max_order() }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    /// Multiply `u0`, `u1`, `f` and the manufactured solution by the bump.
    #[serde(default)]
    pub compact: bool,
    pub u0: Option<Exprs>,
    pub u1: Option<Exprs>,
    /// Forcing, one entry per t-order.
    #[serde(default)]
    pub f: Vec<Exprs>,
    /// Boundary values as an expression of the boundary point and `t`.
    pub ub: Option<String>,
    /// Boundary values as t-coefficients, each an expression of the point.
    pub ub_series: Option<Vec<String>>,
    pub lift_width: Option<f64>,
    #[serde(default = "default_lift_order")]
    pub lift_order: usize,
    /// Maxwell: curl potentials, made compact by the bump.
    pub d0_potential: Option<[String; 3]>,
    pub b0_potential: Option<[String; 3]>,
    /// Maxwell: `G1` per t-order, three components each.
    #[serde(default)]
    pub g1: Vec<[String; 3]>,
    /// Maxwell: potential of `G2` per t-order.
    #[serde(default)]
    pub g2_potential: Vec<[String; 3]>,
}

fn default_lift_order() -> usize {
    8
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParabolicConfig {
    /// Row-major `n × n`.
    pub second: Vec<Exprs>,
    #[serde(default)]
    pub first: Vec<Exprs>,
    pub zeroth: Option<Exprs>,
    pub mu: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonlinearConfig {
    pub b0: Option<Exprs>,
    #[serde(default)]
    pub b1: Vec<Exprs>,
    /// Row-major `n × n`.
    #[serde(default)]
    pub b2: Vec<Exprs>,
    pub lambda: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ATerm {
    pub i: usize,
    pub j: usize,
    pub r: usize,
    pub m: usize,
    pub orders: Exprs,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BTerm {
    pub i: usize,
    pub j: usize,
    pub m: usize,
    pub orders: Exprs,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GTerm {
    pub i: usize,
    pub j: usize,
    pub orders: Exprs,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub components: usize,
    pub mu: f64,
    /// Shorthand for `a_iirr` on every component and axis.
    pub diagonal: Option<Exprs>,
    #[serde(default)]
    pub a: Vec<ATerm>,
    #[serde(default)]
    pub b: Vec<BTerm>,
    #[serde(default)]
    pub g: Vec<GTerm>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlateConfig {
    pub e1: f64,
    pub e2: f64,
    pub shear: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub density: f64,
    #[serde(default)]
    pub a0: f64,
    #[serde(default)]
    pub a1: f64,
    pub thickness: String,
    pub thickness_bounds: [f64; 2],
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaxwellConfig {
    pub mu_hat: String,
    pub xi_hat: String,
    #[serde(default = "zero_expr")]
    pub sigma: String,
}

fn zero_expr() -> String {
    "0".into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeName {
    CrankNicolson,
    ThetaMethod,
    CentralDifferenceWave,
    MaxwellLeapfrog,
}

impl std::str::FromStr for SchemeName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "crank_nicolson" => Ok(SchemeName::CrankNicolson),
            "theta_method" => Ok(SchemeName::ThetaMethod),
            "central_difference_wave" => Ok(SchemeName::CentralDifferenceWave),
            "maxwell_leapfrog" => Ok(SchemeName::MaxwellLeapfrog),
            other => Err(format!(
                "unknown scheme `{other}` (expected crank_nicolson, theta_method, central_difference_wave or maxwell_leapfrog)"
            )),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    pub scheme: SchemeName,
    pub dt: f64,
    pub theta: Option<f64>,
    pub cfl: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    #[serde(default)]
    pub orders: Vec<usize>,
    #[serde(default)]
    pub counts: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManufactureConfig {
    /// Target solution, one entry per t-order.
    pub solution: Vec<Exprs>,
}

/// A configuration problem located by its path in the config tree.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(path: impl Into<String>, message: impl fmt::Display) -> Self {
        Self { path: path.into(), message: message.to_string() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "config: {}", self.message)
        } else {
            write!(f, "config `{}`: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

pub fn parse(text: &str) -> Result<Config, ConfigError> {
    let de = toml::Deserializer::new(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let path = if path == "." { String::new() } else { path };
        ConfigError::new(path, inner.message().trim())
    })
}

pub fn load(path: &Path) -> anyhow::Result<Config> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
    Ok(parse(&text)?)
}
