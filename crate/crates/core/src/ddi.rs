//! Free-space dipole-dipole coupling between emitters.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::math::{abs, cos, sin};
use crate::params::{DdiMode, ValidatedConfig};

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum DdiError {
    #[error("dipole-dipole coupling is singular at separation phase {0} (must be > 0)")]
    NonPositiveSeparation(f64),
    #[error("nearest-neighbour coupling law vanishes at R = {0}; manual scaling undefined")]
    DegenerateScale(f64),
    #[error("DDI matrix is {found}x{found}, expected {expected}x{expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("expected {expected} matrix entries, found {found}")]
    WrongLength { expected: usize, found: usize },
    #[error("DDI matrix not symmetric at ({i}, {j})")]
    Asymmetric { i: usize, j: usize },
    #[error("DDI matrix has non-zero diagonal at {0}")]
    NonZeroDiagonal(usize),
    #[error("DDI matrix entry ({i}, {j}) is not finite")]
    NonFinite { i: usize, j: usize },
}

/// Coherent dipole-dipole coupling in units of Γ0.
///
/// `separation` is the dimensionless phase R = ω_eg·|r_i − r_j|/c and
/// `dipole_angle` is the angle between the dipole moment and the separation
/// vector. A single 3/4 prefactor multiplies both angular brackets:
///
/// J = ¾ [ (cos R/R³ + sin R/R² − cos R/R)
///       + cos²θ (cos R/R − 3 cos R/R³ − 3 sin R/R²) ]
pub fn ddi_coupling(separation: f64, dipole_angle: f64) -> Result<f64, DdiError> {
    if !(separation > 0.0) || !separation.is_finite() {
        return Err(DdiError::NonPositiveSeparation(separation));
    }
    let r = separation;
    let (s, c) = (sin(r), cos(r));
    let (r2, r3) = (r * r, r * r * r);
    let transverse = c / r3 + s / r2 - c / r;
    let cos_theta = cos(dipole_angle);
    let longitudinal = c / r - 3.0 * c / r3 - 3.0 * s / r2;
    Ok(0.75 * (transverse + cos_theta * cos_theta * longitudinal))
}

/// Symmetric N×N real coupling matrix with zero diagonal (Γ0 units).
#[derive(Debug, Clone, PartialEq)]
pub struct DdiMatrix {
    n: usize,
    values: Vec<f64>,
}

impl DdiMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            values: vec![0.0; n * n],
        }
    }

    /// Builds a translation-invariant matrix from couplings indexed by
    /// emitter offset: `by_offset[k - 1]` is J between emitters k apart.
    pub fn from_offsets(n: usize, by_offset: &[f64]) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    m.values[i * n + j] = by_offset[i.abs_diff(j) - 1];
                }
            }
        }
        m
    }

    /// Wraps a row-major matrix after checking symmetry and the diagonal.
    pub fn from_row_major(n: usize, values: Vec<f64>) -> Result<Self, DdiError> {
        if values.len() != n * n {
            return Err(DdiError::WrongLength {
                expected: n * n,
                found: values.len(),
            });
        }
        for i in 0..n {
            if values[i * n + i] != 0.0 {
                return Err(DdiError::NonZeroDiagonal(i));
            }
            for j in 0..n {
                if !values[i * n + j].is_finite() {
                    return Err(DdiError::NonFinite { i, j });
                }
                if values[i * n + j] != values[j * n + i] {
                    return Err(DdiError::Asymmetric { i, j });
                }
            }
        }
        Ok(Self { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.n.max(1))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, &v| m.max(abs(v)))
    }
}

/// Assembles the all-to-all coupling matrix for a periodic chain.
///
/// Pairs k sites apart sit at separation phase k·R_step, so J_ij depends
/// only on |i − j| and every pair is included.
pub fn ddi_matrix(config: &ValidatedConfig) -> Result<DdiMatrix, DdiError> {
    let n = config.n_emitters();
    let r_step = config.phases().r_step;
    let angle = config.config().dipole_angle;
    let law = |k: usize| ddi_coupling(k as f64 * r_step, angle);

    let by_offset: Vec<f64> = match config.config().ddi_mode {
        DdiMode::Off => return Ok(DdiMatrix::zeros(n)),
        DdiMode::Auto => (1..n).map(law).collect::<Result<_, _>>()?,
        DdiMode::Manual { nearest_neighbor } => {
            let reference = law(1)?;
            if reference == 0.0 {
                return Err(DdiError::DegenerateScale(r_step));
            }
            let scale = nearest_neighbor / reference;
            (1..n)
                .map(|k| match k {
                    1 => Ok(nearest_neighbor),
                    _ => law(k).map(|j| j * scale),
                })
                .collect::<Result<_, _>>()?
        }
    };
    Ok(DdiMatrix::from_offsets(n, &by_offset))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::SystemConfig;
    use core::f64::consts::PI;

    // Frozen from a 30-digit evaluation of the coupling law (mpmath).
    const J_NN: f64 = 23.082541374162;
    const J_NNN: f64 = 2.597093873725706;
    const J_AT_PI: f64 = 0.21454376381294339;

    #[test]
    fn nearest_neighbour_at_twentieth_wavelength() {
        let j = ddi_coupling(2.0 * PI / 20.0, PI / 2.0).unwrap();
        assert!((j - J_NN).abs() < 1e-12);
        assert!((j - 23.10).abs() < 0.05);
    }

    #[test]
    fn half_period_value() {
        let j = ddi_coupling(PI, PI / 2.0).unwrap();
        assert!((j - J_AT_PI).abs() < 1e-14);
    }

    #[test]
    fn longitudinal_bracket_shares_prefactor() {
        // θ = 0 and θ = π/4 exercise the cos²θ bracket; mpmath values.
        assert!((ddi_coupling(1.0, 0.0).unwrap() + 2.0726599360140543).abs() < 1e-13);
        assert!((ddi_coupling(1.0, PI / 4.0).unwrap() + 0.720778348704066).abs() < 1e-13);
    }

    #[test]
    fn far_field_vanishes() {
        assert!(ddi_coupling(1e6, PI / 2.0).unwrap().abs() < 1e-6);
    }

    #[test]
    fn zero_separation_is_an_error() {
        assert_eq!(
            ddi_coupling(0.0, PI / 2.0),
            Err(DdiError::NonPositiveSeparation(0.0))
        );
        assert!(ddi_coupling(-1.0, 0.0).is_err());
    }

    #[test]
    fn two_emitter_auto_matrix() {
        let v = SystemConfig::reference_chiral(2).validate().unwrap();
        let m = ddi_matrix(&v).unwrap();
        assert_eq!(m.get(0, 0), 0.0);
        assert!((m.get(0, 1) - J_NN).abs() < 1e-12);
        assert_eq!(m.get(0, 1), m.get(1, 0));
    }

    #[test]
    fn three_emitter_auto_matrix_includes_all_pairs() {
        let v = SystemConfig::reference_chiral(3).validate().unwrap();
        let m = ddi_matrix(&v).unwrap();
        assert!((m.get(0, 2) - J_NNN).abs() < 1e-12);
        assert_eq!(m.get(0, 1), m.get(1, 2));
    }

    #[test]
    fn off_mode_is_zero() {
        let v = SystemConfig::reference_chiral(3)
            .with_ddi(DdiMode::Off)
            .validate()
            .unwrap();
        assert_eq!(ddi_matrix(&v).unwrap(), DdiMatrix::zeros(3));
    }

    #[test]
    fn manual_mode_scales_distance_law() {
        let v = SystemConfig::reference_chiral(3)
            .with_ddi(DdiMode::Manual {
                nearest_neighbor: 23.10,
            })
            .validate()
            .unwrap();
        let m = ddi_matrix(&v).unwrap();
        assert_eq!(m.get(0, 1), 23.10);
        assert!((m.get(0, 2) - J_NNN * 23.10 / J_NN).abs() < 1e-12);
    }

    #[test]
    fn row_major_checks() {
        assert!(DdiMatrix::from_row_major(2, vec![0.0, 1.0, 1.0, 0.0]).is_ok());
        assert_eq!(
            DdiMatrix::from_row_major(2, vec![0.0, 1.0, 2.0, 0.0]),
            Err(DdiError::Asymmetric { i: 0, j: 1 })
        );
        assert_eq!(
            DdiMatrix::from_row_major(2, vec![1.0, 0.0, 0.0, 0.0]),
            Err(DdiError::NonZeroDiagonal(0))
        );
    }
}
