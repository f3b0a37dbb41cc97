use alloc::vec::Vec;

use thiserror::Error;

use crate::ddi::{ddi_matrix, DdiError, DdiMatrix};
use crate::params::{ConfigErrors, SystemConfig, ValidatedConfig};
use crate::scattering::{solve_batch, solve_transport, SolveError, TransportSolution};
use crate::spectra::{self, Channel, Peak, SpectraError, SpectrumResult};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid config: {0}")]
    Config(#[from] ConfigErrors),
    #[error(transparent)]
    Ddi(#[from] DdiError),
}

/// A validated chain together with its DDI matrix, ready to solve.
#[derive(Debug, Clone, PartialEq)]
pub struct Ladder {
    config: ValidatedConfig,
    ddi: DdiMatrix,
}

impl Ladder {
    pub fn new(config: SystemConfig) -> Result<Self, ModelError> {
        let config = config.validate()?;
        let ddi = ddi_matrix(&config)?;
        Ok(Self { config, ddi })
    }

    /// Uses an externally supplied coupling matrix instead of the config's
    /// DDI mode.
    pub fn with_ddi(config: ValidatedConfig, ddi: DdiMatrix) -> Result<Self, ModelError> {
        if ddi.n() != config.n_emitters() {
            return Err(DdiError::DimensionMismatch {
                expected: config.n_emitters(),
                found: ddi.n(),
            }
            .into());
        }
        Ok(Self { config, ddi })
    }

    pub fn config(&self) -> &ValidatedConfig {
        &self.config
    }

    pub fn ddi(&self) -> &DdiMatrix {
        &self.ddi
    }

    pub fn solve(&self, delta: f64) -> Result<TransportSolution, SolveError> {
        solve_transport(&self.config, &self.ddi, delta)
    }

    pub fn solve_batch(&self, deltas: &[f64]) -> Vec<Result<TransportSolution, SolveError>> {
        solve_batch(&self.config, &self.ddi, deltas)
    }

    pub fn scan(&self, grid: &[f64]) -> Result<SpectrumResult, SpectraError> {
        spectra::scan(&self.config, &self.ddi, grid)
    }

    /// Peaks of `channel` in `result`; with `refine`, each is polished by
    /// fresh solves around its grid location.
    pub fn find_peaks(
        &self,
        result: &SpectrumResult,
        channel: Channel,
        refine: bool,
    ) -> Result<Vec<Peak>, SpectraError> {
        let peaks = spectra::find_peaks(result, channel)?;
        if !refine {
            return Ok(peaks);
        }
        let eval = |d: f64| self.solve(d).ok().map(|s| channel.value(&s.intensities));
        Ok(peaks
            .iter()
            .map(|p| spectra::refine_peak(result, p, &eval))
            .collect())
    }
}
