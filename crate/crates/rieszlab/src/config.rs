//! Flat `key = value` run configuration.
//!
//! One struct, no tables, no nesting: a config file names the study and
//! overrides whichever knobs it cares about.  Unknown keys are rejected so a
//! typo cannot silently fall back to a default.

use std::path::Path;

use serde::Deserialize;

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Which study to run: theorem_main, theorem_rate, rough_rate,
    /// bessel_characterization, or inversion.
    pub experiment: String,
    /// Box half width L; the grid covers [-L, L).
    #[serde(default = "default_half_width")]
    pub half_width: f64,
    /// Samples per axis (a power of two).
    #[serde(default = "default_points")]
    pub points: usize,
    /// Order of the fractional derivative.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Order of the iterated difference in the hypersingular integral.
    #[serde(default = "default_ell")]
    pub ell: u32,
    /// Width of the Gaussian test field where one is used.
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    /// Exponent family token: constant, rational, or low_rational.
    #[serde(default = "default_exponent")]
    pub exponent: String,
    /// Number of dyadic levels 2^{-1} .. 2^{-eps_levels} in the sweep.
    #[serde(default = "default_eps_levels")]
    pub eps_levels: u32,
    /// Seed for the random test fields.
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Per-frequency tolerance of the semigroup-difference series.
    #[serde(default = "default_series_tol")]
    pub series_tol: f64,
    /// Where reports land; default "reports" under the working directory.
    #[serde(default)]
    pub output_dir: Option<String>,
}

fn default_half_width() -> f64 {
    20.0
}
fn default_points() -> usize {
    2048
}
fn default_alpha() -> f64 {
    0.5
}
fn default_ell() -> u32 {
    2
}
fn default_sigma() -> f64 {
    2.0
}
fn default_exponent() -> String {
    "rational".into()
}
fn default_eps_levels() -> u32 {
    8
}
fn default_seed() -> u64 {
    11
}
fn default_series_tol() -> f64 {
    1e-12
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| LabError::config(format!("bad config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::config(format!("cannot read {}: {e}", path.display())))?;
        RunConfig::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.half_width > 0.0) || !self.half_width.is_finite() {
            return Err(LabError::config(format!(
                "half_width must be positive, got {}",
                self.half_width
            )));
        }
        if !self.points.is_power_of_two() || self.points < 16 {
            return Err(LabError::config(format!(
                "points must be a power of two >= 16, got {}",
                self.points
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < self.ell as f64) {
            return Err(LabError::config(format!(
                "need 0 < alpha < ell, got alpha {} with ell {}",
                self.alpha, self.ell
            )));
        }
        if self.ell % 2 != 0 {
            return Err(LabError::config(format!(
                "ell must be even, got {}",
                self.ell
            )));
        }
        if !(self.sigma > 0.0) {
            return Err(LabError::config(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        if self.eps_levels == 0 || self.eps_levels > 40 {
            return Err(LabError::config(format!(
                "eps_levels must be in 1..=40, got {}",
                self.eps_levels
            )));
        }
        if !(self.series_tol > 0.0) {
            return Err(LabError::config(format!(
                "series_tol must be positive, got {}",
                self.series_tol
            )));
        }
        Ok(())
    }
}
