//! Physical parameters of the emitter chain and waveguide ladder.
//!
//! Rates are in units of Γ0, lengths in nanometres, angles in radians.
//! Group velocities are absorbed into the coupling rates (Γ = V²/v_g with
//! v_g = 1), so amplitude-level couplings are recovered as `sqrt(rate)`.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use thiserror::Error;

/// Dipole-dipole interaction mode.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum DdiMode {
    /// All pairs from the free-space coupling law at the actual separations.
    Auto,
    /// Nearest-neighbour value fixed by the user (Γ0); longer-range pairs
    /// follow the same distance law relative to the nearest-neighbour value.
    Manual { nearest_neighbor: f64 },
    /// No direct coupling.
    Off,
}

impl DdiMode {
    /// Parses the textual mode name used in config files.
    pub fn parse(name: &str, nearest_neighbor: Option<f64>) -> Result<Self, ConfigError> {
        match name {
            "auto" => Ok(DdiMode::Auto),
            "off" => Ok(DdiMode::Off),
            "manual" => nearest_neighbor
                .map(|value| DdiMode::Manual {
                    nearest_neighbor: value,
                })
                .ok_or(ConfigError::ManualDdiMissingValue),
            other => Err(ConfigError::UnknownDdiMode(other.into())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DdiMode::Auto => "auto",
            DdiMode::Manual { .. } => "manual",
            DdiMode::Off => "off",
        }
    }
}

/// Per-emitter replacement of the chain-wide rates. `index` is zero-based.
#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct EmitterOverride {
    pub index: usize,
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Option::is_none")
    )]
    pub gamma: Option<f64>,
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Option::is_none")
    )]
    pub gamma_dr: Option<f64>,
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Option::is_none")
    )]
    pub gamma_dl: Option<f64>,
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Option::is_none")
    )]
    pub gamma_ur: Option<f64>,
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Option::is_none")
    )]
    pub gamma_ul: Option<f64>,
}

/// Full physical description of the router.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SystemConfig {
    pub n_emitters: usize,
    /// Spontaneous emission into non-guided modes.
    pub gamma: f64,
    /// Lower waveguide, right-moving channel.
    pub gamma_dr: f64,
    /// Lower waveguide, left-moving channel.
    pub gamma_dl: f64,
    /// Upper waveguide, right-moving channel.
    pub gamma_ur: f64,
    /// Upper waveguide, left-moving channel.
    pub gamma_ul: f64,
    /// Inter-emitter separation (nm).
    pub spacing: f64,
    /// Emitter transition wavelength (nm); sets the dipole-dipole phase.
    pub lambda_qd: f64,
    /// Guided-mode wavelength (nm); sets the propagation phase.
    pub lambda_sp: f64,
    /// Angle between dipole moment and chain axis (rad).
    pub dipole_angle: f64,
    pub ddi_mode: DdiMode,
    pub emitter_overrides: Vec<EmitterOverride>,
    /// Free-space decay rate in MHz. Metadata only.
    pub gamma0_mhz: Option<f64>,
    /// Floor every γ_j at 1e-9 Γ0 so lossless exact poles become solvable.
    pub regularize_poles: bool,
}

/// Regularising loss used when [`SystemConfig::regularize_poles`] is set.
pub const POLE_REGULARIZATION: f64 = 1e-9;

impl SystemConfig {
    /// Quantum-dot chain next to two identical silver nanowires with chiral
    /// (right-moving only) coupling: Γ = 11.03 Γ0, γ = 6.86 Γ0, L = 32.75 nm,
    /// λ_QD = 655 nm, λ_sp = 211.8 nm, dipoles perpendicular to the chain.
    pub fn reference_chiral(n_emitters: usize) -> Self {
        Self {
            n_emitters,
            gamma: 6.86,
            gamma_dr: 11.03,
            gamma_dl: 0.0,
            gamma_ur: 11.03,
            gamma_ul: 0.0,
            spacing: 32.75,
            lambda_qd: 655.0,
            lambda_sp: 211.8,
            dipole_angle: PI / 2.0,
            ddi_mode: DdiMode::Auto,
            emitter_overrides: Vec::new(),
            gamma0_mhz: Some(7.5),
            regularize_poles: false,
        }
    }

    /// Same geometry as [`Self::reference_chiral`] with all four directional
    /// rates equal to 11.03 Γ0.
    pub fn reference_symmetric(n_emitters: usize) -> Self {
        Self {
            gamma_dl: 11.03,
            gamma_ul: 11.03,
            ..Self::reference_chiral(n_emitters)
        }
    }

    pub fn with_emitters(mut self, n: usize) -> Self {
        self.n_emitters = n;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_spacing(mut self, spacing: f64) -> Self {
        self.spacing = spacing;
        self
    }

    pub fn with_ddi(mut self, mode: DdiMode) -> Self {
        self.ddi_mode = mode;
        self
    }

    /// Sets the four directional rates (dr, dl, ur, ul).
    pub fn with_rates(mut self, dr: f64, dl: f64, ur: f64, ul: f64) -> Self {
        self.gamma_dr = dr;
        self.gamma_dl = dl;
        self.gamma_ur = ur;
        self.gamma_ul = ul;
        self
    }

    /// Checks every invariant and attaches derived quantities.
    pub fn validate(self) -> Result<ValidatedConfig, ConfigErrors> {
        validate(self)
    }
}

/// Propagation and dipole-dipole phases per lattice step.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Phases {
    /// Guided-mode phase per step, 2πL/λ_sp.
    pub theta: f64,
    /// Free-space phase per step, 2πL/λ_QD.
    pub r_step: f64,
}

/// Effective rates of one emitter after overrides.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EmitterRates {
    pub gamma: f64,
    pub gamma_dr: f64,
    pub gamma_dl: f64,
    pub gamma_ur: f64,
    pub gamma_ul: f64,
}

impl EmitterRates {
    pub fn is_chiral(&self) -> bool {
        self.gamma_dl == 0.0 && self.gamma_ul == 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("n_emitters must be at least 1")]
    ZeroEmitters,
    #[error("{name} must be non-negative (got {value})")]
    NegativeRate { name: &'static str, value: f64 },
    #[error("{name} must be finite")]
    NonFinite { name: &'static str },
    #[error("spacing must be positive (got {0})")]
    NonPositiveSpacing(f64),
    #[error("{name} must be positive (got {value})")]
    NonPositiveWavelength { name: &'static str, value: f64 },
    #[error("unknown ddi_mode \"{0}\" (expected auto, manual or off)")]
    UnknownDdiMode(String),
    #[error("ddi_mode \"manual\" requires a nearest-neighbour coupling value")]
    ManualDdiMissingValue,
    #[error("emitter override index {index} out of range for {n} emitters")]
    OverrideOutOfRange { index: usize, n: usize },
    #[error("{name} in override for emitter {index} must be non-negative (got {value})")]
    NegativeOverride {
        index: usize,
        name: &'static str,
        value: f64,
    },
}

/// Every violation found in one config.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, err) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{err}")?;
        }
        Ok(())
    }
}

impl core::error::Error for ConfigErrors {}

impl ConfigErrors {
    pub fn iter(&self) -> impl Iterator<Item = &ConfigError> {
        self.0.iter()
    }
}

/// A config that passed [`validate`], with its derived quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedConfig {
    config: SystemConfig,
    phases: Phases,
    emitters: Vec<EmitterRates>,
}

impl ValidatedConfig {
    pub fn config(&self) -> &SystemConfig {
        &self.config
    }

    pub fn into_inner(self) -> SystemConfig {
        self.config
    }

    pub fn n_emitters(&self) -> usize {
        self.config.n_emitters
    }

    pub fn phases(&self) -> Phases {
        self.phases
    }

    /// Effective per-emitter rates (overrides and pole regularisation applied).
    pub fn emitters(&self) -> &[EmitterRates] {
        &self.emitters
    }

    /// True when no emitter couples to a left-moving channel.
    pub fn is_chiral(&self) -> bool {
        self.emitters.iter().all(EmitterRates::is_chiral)
    }

    /// Propagation phase at emitter `j` (zero-based): jΘ.
    pub fn site_phase(&self, j: usize) -> f64 {
        j as f64 * self.phases.theta
    }
}

/// Θ = 2πL/λ_sp and R_step = 2πL/λ_QD, both evaluated at the carrier.
pub fn derive_phases(spacing: f64, lambda_sp: f64, lambda_qd: f64) -> Phases {
    Phases {
        theta: 2.0 * PI * spacing / lambda_sp,
        r_step: 2.0 * PI * spacing / lambda_qd,
    }
}

fn check_rate(errors: &mut Vec<ConfigError>, name: &'static str, value: f64) {
    if !value.is_finite() {
        errors.push(ConfigError::NonFinite { name });
    } else if value < 0.0 {
        errors.push(ConfigError::NegativeRate { name, value });
    }
}

fn check_positive(errors: &mut Vec<ConfigError>, name: &'static str, value: f64) {
    if !value.is_finite() {
        errors.push(ConfigError::NonFinite { name });
    } else if value <= 0.0 {
        errors.push(if name == "spacing" {
            ConfigError::NonPositiveSpacing(value)
        } else {
            ConfigError::NonPositiveWavelength { name, value }
        });
    }
}

/// Validates `config`, reporting every violation rather than the first.
pub fn validate(config: SystemConfig) -> Result<ValidatedConfig, ConfigErrors> {
    let mut errors = Vec::new();
    if config.n_emitters == 0 {
        errors.push(ConfigError::ZeroEmitters);
    }
    check_rate(&mut errors, "gamma", config.gamma);
    check_rate(&mut errors, "gamma_dr", config.gamma_dr);
    check_rate(&mut errors, "gamma_dl", config.gamma_dl);
    check_rate(&mut errors, "gamma_ur", config.gamma_ur);
    check_rate(&mut errors, "gamma_ul", config.gamma_ul);
    check_positive(&mut errors, "spacing", config.spacing);
    check_positive(&mut errors, "lambda_qd", config.lambda_qd);
    check_positive(&mut errors, "lambda_sp", config.lambda_sp);
    if !config.dipole_angle.is_finite() {
        errors.push(ConfigError::NonFinite {
            name: "dipole_angle",
        });
    }
    if let DdiMode::Manual { nearest_neighbor } = config.ddi_mode {
        if !nearest_neighbor.is_finite() {
            errors.push(ConfigError::NonFinite {
                name: "ddi_nearest_neighbor",
            });
        }
    }
    if let Some(g0) = config.gamma0_mhz {
        check_positive(&mut errors, "gamma0_mhz", g0);
    }

    for ov in &config.emitter_overrides {
        if ov.index >= config.n_emitters {
            errors.push(ConfigError::OverrideOutOfRange {
                index: ov.index,
                n: config.n_emitters,
            });
        }
        let fields = [
            ("gamma", ov.gamma),
            ("gamma_dr", ov.gamma_dr),
            ("gamma_dl", ov.gamma_dl),
            ("gamma_ur", ov.gamma_ur),
            ("gamma_ul", ov.gamma_ul),
        ];
        for (name, value) in fields {
            if let Some(value) = value {
                if !(value >= 0.0 && value.is_finite()) {
                    errors.push(ConfigError::NegativeOverride {
                        index: ov.index,
                        name,
                        value,
                    });
                }
            }
        }
    }

    if !errors.is_empty() {
        return Err(ConfigErrors(errors));
    }

    let base = EmitterRates {
        gamma: config.gamma,
        gamma_dr: config.gamma_dr,
        gamma_dl: config.gamma_dl,
        gamma_ur: config.gamma_ur,
        gamma_ul: config.gamma_ul,
    };
    let mut emitters = alloc::vec![base; config.n_emitters];
    for ov in &config.emitter_overrides {
        let e = &mut emitters[ov.index];
        e.gamma = ov.gamma.unwrap_or(e.gamma);
        e.gamma_dr = ov.gamma_dr.unwrap_or(e.gamma_dr);
        e.gamma_dl = ov.gamma_dl.unwrap_or(e.gamma_dl);
        e.gamma_ur = ov.gamma_ur.unwrap_or(e.gamma_ur);
        e.gamma_ul = ov.gamma_ul.unwrap_or(e.gamma_ul);
    }
    if config.regularize_poles {
        for e in &mut emitters {
            e.gamma = e.gamma.max(POLE_REGULARIZATION);
        }
    }

    let phases = derive_phases(config.spacing, config.lambda_sp, config.lambda_qd);
    Ok(ValidatedConfig {
        config,
        phases,
        emitters,
    })
}
