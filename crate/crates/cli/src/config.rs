//! Run configuration: a TOML file (unknown keys rejected) with command-line overrides.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Deserialize;

use crate::complex::parse_complex;

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub potential: PotentialConfig,
    pub real_form: RealForm,
    pub grid: GridConfig,
    pub lambda: LambdaConfig,
    pub truncation: TruncationConfig,
    pub tolerances: Tolerances,
    /// Mean curvature.
    pub h: f64,
    pub seed: u64,
    pub sequential: bool,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct PotentialConfig {
    pub k: i32,
    /// Complex literal.
    pub c: String,
    /// Use the vacuum λ⁻¹·offdiag(1, 1)·dz instead of ξ_k.
    pub vacuum: bool,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum RealForm {
    Su2,
    Su11,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum GridKind {
    /// Rect for the vacuum, disk for k ≥ 0, annulus otherwise.
    Auto,
    Annulus,
    Disk,
    Rect,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub kind: GridKind,
    pub r0: f64,
    pub r1: f64,
    /// Angular range in radians.
    pub theta_max: f64,
    pub n_r: usize,
    pub n_theta: usize,
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub nx: usize,
    pub ny: usize,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct LambdaConfig {
    /// Size M of the circle grid.
    pub samples: usize,
    /// λ₀ = e^{i·t0}.
    pub t0: f64,
    /// Number of λ₀ values in the non-closing sweep.
    pub sweep: usize,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct TruncationConfig {
    pub n_z: usize,
    pub n_lambda: usize,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub ode: f64,
    /// Threshold below which a seam or monodromy counts as closed.
    pub closing: f64,
    /// Gauge and chain residuals.
    pub gauge: f64,
    /// Frobenius coefficient residuals.
    pub frobenius: f64,
    /// Monodromy against the closed form, and Iwasawa round trips.
    pub numeric: f64,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub name: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            potential: PotentialConfig::default(),
            real_form: RealForm::Su2,
            grid: GridConfig::default(),
            lambda: LambdaConfig::default(),
            truncation: TruncationConfig::default(),
            tolerances: Tolerances::default(),
            h: 0.5,
            seed: 0,
            sequential: false,
            output: OutputConfig::default(),
        }
    }
}

impl Default for PotentialConfig {
    fn default() -> Self {
        Self { k: -1, c: "1".into(), vacuum: false }
    }
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            kind: GridKind::Auto,
            r0: 0.5,
            r1: 1.0,
            theta_max: std::f64::consts::TAU,
            n_r: 8,
            n_theta: 33,
            x0: -0.3,
            x1: 0.3,
            y0: -0.3,
            y1: 0.3,
            nx: 32,
            ny: 32,
        }
    }
}

impl Default for LambdaConfig {
    fn default() -> Self {
        Self { samples: 64, t0: 0.0, sweep: 16 }
    }
}

impl Default for TruncationConfig {
    fn default() -> Self {
        Self { n_z: 6, n_lambda: 8 }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { ode: 1e-10, closing: 1e-6, gauge: 1e-10, frobenius: 1e-12, numeric: 1e-8 }
    }
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), name: "surface".into() }
    }
}

#[derive(Debug)]
pub enum ConfigError {
    Read(std::io::Error),
    Parse(String),
    Invalid(String),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Read(e) => write!(f, "cannot read config: {e}"),
            ConfigError::Parse(e) => write!(f, "config parse error: {e}"),
            ConfigError::Invalid(e) => write!(f, "invalid config: {e}"),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn load(path: Option<&Path>) -> Result<Self, ConfigError> {
        match path {
            None => Ok(Self::default()),
            Some(p) => Self::from_toml(&std::fs::read_to_string(p).map_err(ConfigError::Read)?),
        }
    }

    pub fn c(&self) -> Result<Complex64, ConfigError> {
        parse_complex(&self.potential.c).map_err(ConfigError::Invalid)
    }

    pub fn lambda0(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.lambda.t0)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        let c = self.c()?;
        if c.norm() == 0.0 && !self.potential.vacuum {
            return bad("c must be nonzero".into());
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("ode", t.ode),
            ("closing", t.closing),
            ("gauge", t.gauge),
            ("frobenius", t.frobenius),
            ("numeric", t.numeric),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return bad(format!("tolerance {name} must be positive, got {v}"));
            }
        }
        if self.h == 0.0 || !self.h.is_finite() {
            return bad(format!("h must be finite and nonzero, got {}", self.h));
        }
        if self.lambda.samples < 4 || !self.lambda.samples.is_multiple_of(2) {
            return bad(format!("lambda.samples must be even and >= 4, got {}", self.lambda.samples));
        }
        if self.lambda.sweep == 0 {
            return bad("lambda.sweep must be positive".into());
        }
        if !self.lambda.t0.is_finite() {
            return bad("lambda.t0 must be finite".into());
        }
        Ok(())
    }
}
