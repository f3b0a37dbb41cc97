//! JSON config files.
//!
//! The file mirrors [`SystemConfig`] with the DDI mode spelled as a string
//! (`"auto"`, `"manual"`, `"off"`) and the manual value in its own key.

use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use chiral_ladder_core::{DdiMode, EmitterOverride, SystemConfig, UniformGrid};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub n_emitters: usize,
    pub gamma: f64,
    pub gamma_dr: f64,
    pub gamma_dl: f64,
    pub gamma_ur: f64,
    pub gamma_ul: f64,
    pub spacing: f64,
    pub lambda_qd: f64,
    pub lambda_sp: f64,
    #[serde(default = "default_dipole_angle")]
    pub dipole_angle: f64,
    #[serde(default = "default_ddi_mode")]
    pub ddi_mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ddi_nearest_neighbor: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub emitter_overrides: Vec<EmitterOverride>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma0_mhz: Option<f64>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub regularize_poles: bool,
    /// Default detuning grid for `spectrum` and `scale-n`; flags override it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detuning: Option<GridSpec>,
}

/// Partially specified grid; missing fields fall back to command defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
}

impl GridSpec {
    /// Fields of `self` take precedence over `fallback`.
    pub fn or(self, fallback: GridSpec) -> GridSpec {
        GridSpec {
            min: self.min.or(fallback.min),
            max: self.max.or(fallback.max),
            points: self.points.or(fallback.points),
        }
    }

    pub fn resolve(self, default: UniformGrid, what: &str) -> Result<UniformGrid, CliError> {
        let min = self.min.unwrap_or(default.min);
        let max = self.max.unwrap_or(default.max);
        let points = self.points.unwrap_or(default.points);
        UniformGrid::new(min, max, points).map_err(|e| CliError::Usage(format!("{what}: {e}")))
    }
}

fn default_dipole_angle() -> f64 {
    FRAC_PI_2
}

fn default_ddi_mode() -> String {
    "auto".into()
}

fn is_false(b: &bool) -> bool {
    !*b
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| {
            CliError::Config(vec![format!(
                "malformed config at line {}, column {}: {e}",
                e.line(),
                e.column()
            )])
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Converts to a core config, validating it and reporting every problem.
    pub fn to_system(&self) -> Result<SystemConfig, CliError> {
        let mut problems = Vec::new();
        let ddi_mode = match DdiMode::parse(&self.ddi_mode, self.ddi_nearest_neighbor) {
            Ok(mode) => mode,
            Err(e) => {
                problems.push(e.to_string());
                DdiMode::Off
            }
        };
        if self.ddi_nearest_neighbor.is_some() && !matches!(ddi_mode, DdiMode::Manual { .. }) {
            problems.push(format!(
                "ddi_nearest_neighbor is only meaningful with ddi_mode \"manual\" (got \"{}\")",
                self.ddi_mode
            ));
        }
        let config = SystemConfig {
            n_emitters: self.n_emitters,
            gamma: self.gamma,
            gamma_dr: self.gamma_dr,
            gamma_dl: self.gamma_dl,
            gamma_ur: self.gamma_ur,
            gamma_ul: self.gamma_ul,
            spacing: self.spacing,
            lambda_qd: self.lambda_qd,
            lambda_sp: self.lambda_sp,
            dipole_angle: self.dipole_angle,
            ddi_mode,
            emitter_overrides: self.emitter_overrides.clone(),
            gamma0_mhz: self.gamma0_mhz,
            regularize_poles: self.regularize_poles,
        };
        if let Err(errors) = config.clone().validate() {
            problems.extend(errors.iter().map(ToString::to_string));
        }
        if problems.is_empty() {
            Ok(config)
        } else {
            Err(CliError::Config(problems))
        }
    }

    pub fn from_system(config: &SystemConfig, detuning: Option<GridSpec>) -> Self {
        let ddi_nearest_neighbor = match config.ddi_mode {
            DdiMode::Manual { nearest_neighbor } => Some(nearest_neighbor),
            _ => None,
        };
        Self {
            n_emitters: config.n_emitters,
            gamma: config.gamma,
            gamma_dr: config.gamma_dr,
            gamma_dl: config.gamma_dl,
            gamma_ur: config.gamma_ur,
            gamma_ul: config.gamma_ul,
            spacing: config.spacing,
            lambda_qd: config.lambda_qd,
            lambda_sp: config.lambda_sp,
            dipole_angle: config.dipole_angle,
            ddi_mode: config.ddi_mode.name().into(),
            ddi_nearest_neighbor,
            emitter_overrides: config.emitter_overrides.clone(),
            gamma0_mhz: config.gamma0_mhz,
            regularize_poles: config.regularize_poles,
            detuning,
        }
    }
}
