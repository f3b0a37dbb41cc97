//! Detuning scans and the derived routing figures of merit.

use alloc::vec::Vec;

use thiserror::Error;

use crate::ddi::DdiMatrix;
use crate::model::{Ladder, ModelError};
use crate::params::{SystemConfig, ValidatedConfig};
use crate::scattering::{solve_batch, Intensities, SolveError};

/// Golden-section polishing stops once the bracket is narrower than this (Γ0).
pub const REFINE_TOLERANCE: f64 = 1e-5;
const REFINE_MAX_ITER: usize = 200;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectraError {
    #[error("grid is empty")]
    EmptyGrid,
    #[error("grid must be strictly increasing (index {0})")]
    NonMonotoneGrid(usize),
    #[error("invalid grid: min {min}, max {max}, points {points}")]
    InvalidGrid { min: f64, max: f64, points: usize },
    #[error("spacing must be positive (got {0} nm)")]
    NonPositiveSpacing(f64),
    #[error("emitter-number list is empty")]
    EmptyEmitterList,
    #[error("emitter numbers must be strictly increasing and non-zero (got {0} after {1})")]
    NonAscendingEmitters(usize, usize),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// `points` evenly spaced values from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct UniformGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl UniformGrid {
    pub fn new(min: f64, max: f64, points: usize) -> Result<Self, SpectraError> {
        let ok = min.is_finite()
            && max.is_finite()
            && points >= 1
            && (if points == 1 { min <= max } else { min < max });
        if ok {
            Ok(Self { min, max, points })
        } else {
            Err(SpectraError::InvalidGrid { min, max, points })
        }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return alloc::vec![self.min];
        }
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|k| match k {
                0 => self.min,
                k if k + 1 == self.points => self.max,
                k => self.min + (self.max - self.min) * (k as f64 / last),
            })
            .collect()
    }
}

/// Output channel of the four-port router.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Channel {
    T,
    R,
    Tt,
    Rt,
    #[cfg_attr(feature = "serde", serde(rename = "loss"))]
    Loss,
}

impl Channel {
    pub const ALL: [Channel; 5] = [
        Channel::T,
        Channel::R,
        Channel::Tt,
        Channel::Rt,
        Channel::Loss,
    ];

    pub fn value(&self, i: &Intensities) -> f64 {
        match self {
            Channel::T => i.t,
            Channel::R => i.r,
            Channel::Tt => i.tt,
            Channel::Rt => i.rt,
            Channel::Loss => i.loss,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Channel::T => "T",
            Channel::R => "R",
            Channel::Tt => "Tt",
            Channel::Rt => "Rt",
            Channel::Loss => "loss",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Peak {
    pub channel: Channel,
    /// Detuning of the maximum (Γ0).
    pub location: f64,
    pub height: f64,
    pub refined: bool,
    /// Grid sample the peak was found at.
    pub grid_index: usize,
}

/// Intensities on a detuning grid. Rows align with `deltas`; a failed solve
/// stays in its slot.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub deltas: Vec<f64>,
    pub rows: Vec<Result<Intensities, SolveError>>,
    pub peaks: Vec<Peak>,
}

impl SpectrumResult {
    /// Channel values with NaN in failed slots.
    pub fn channel(&self, channel: Channel) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.as_ref().map_or(f64::NAN, |i| channel.value(i)))
            .collect()
    }

    pub fn first_failure(&self) -> Option<&SolveError> {
        self.rows.iter().find_map(|r| r.as_ref().err())
    }

    /// Grid sample with the largest value of `channel`; ties go to the
    /// smaller detuning.
    pub fn argmax(&self, channel: Channel) -> Option<(usize, f64)> {
        self.channel(channel)
            .into_iter()
            .enumerate()
            .filter(|(_, v)| !v.is_nan())
            .fold(None, |best, (i, v)| match best {
                Some((_, b)) if b >= v => best,
                _ => Some((i, v)),
            })
    }
}

fn check_grid(grid: &[f64]) -> Result<(), SpectraError> {
    if grid.is_empty() {
        return Err(SpectraError::EmptyGrid);
    }
    for (k, w) in grid.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(SpectraError::NonMonotoneGrid(k + 1));
        }
    }
    Ok(())
}

/// Solves every grid point. `loss` is 1 − T − R − T̃ − R̃ per row.
pub fn scan(
    config: &ValidatedConfig,
    ddi: &DdiMatrix,
    grid: &[f64],
) -> Result<SpectrumResult, SpectraError> {
    check_grid(grid)?;
    let rows = solve_batch(config, ddi, grid)
        .into_iter()
        .map(|r| r.map(|s| s.intensities))
        .collect();
    Ok(SpectrumResult {
        deltas: grid.to_vec(),
        rows,
        peaks: Vec::new(),
    })
}

/// Interior local maxima of `channel` by three-point comparison.
///
/// A sample is a peak when it is strictly above its left neighbour and above
/// the first differing sample to its right, so a plateau reports its
/// smallest-Δ sample.
pub fn find_peaks(result: &SpectrumResult, channel: Channel) -> Result<Vec<Peak>, SpectraError> {
    if result.deltas.is_empty() {
        return Err(SpectraError::EmptyGrid);
    }
    let y = result.channel(channel);
    let mut peaks = Vec::new();
    for i in 1..y.len().saturating_sub(1) {
        let mut j = i + 1;
        // walk across a plateau to its right edge
        while j < y.len() && y[j] == y[i] {
            j += 1;
        }
        if j < y.len() && y[i] > y[i - 1] && y[i] > y[j] {
            peaks.push(Peak {
                channel,
                location: result.deltas[i],
                height: y[i],
                refined: false,
                grid_index: i,
            });
        }
    }
    Ok(peaks)
}

/// Polishes a grid peak with fresh evaluations of its channel.
///
/// A parabola through the three bracketing samples gives a first estimate,
/// then golden-section search on the bracket narrows the maximum to
/// [`REFINE_TOLERANCE`]. The best point seen (grid sample included) is
/// returned, so the height never drops below the grid value. Peaks on the
/// grid boundary are returned unchanged.
pub fn refine_peak<F>(result: &SpectrumResult, peak: &Peak, eval: &F) -> Peak
where
    F: Fn(f64) -> Option<f64>,
{
    let i = peak.grid_index;
    if i == 0 || i + 1 >= result.deltas.len() {
        return *peak;
    }
    let (x0, x1, x2) = (result.deltas[i - 1], result.deltas[i], result.deltas[i + 1]);
    let mut best = (x1, peak.height);
    let probe = |x: f64, best: &mut (f64, f64)| -> f64 {
        let v = eval(x).filter(|v| !v.is_nan()).unwrap_or(f64::NEG_INFINITY);
        if v > best.1 {
            *best = (x, v);
        }
        v
    };

    let values = result.channel(peak.channel);
    let (y0, y1, y2) = (values[i - 1], values[i], values[i + 1]);
    let num = (x1 - x0) * (x1 - x0) * (y1 - y2) - (x1 - x2) * (x1 - x2) * (y1 - y0);
    let den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    if den != 0.0 {
        let vertex = x1 - 0.5 * num / den;
        if vertex.is_finite() && vertex > x0 && vertex < x2 {
            probe(vertex, &mut best);
        }
    }

    let inv_phi = 0.5 * (crate::math::sqrt(5.0) - 1.0);
    let (mut a, mut b) = (x0, x2);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = probe(c, &mut best);
    let mut fd = probe(d, &mut best);
    for _ in 0..REFINE_MAX_ITER {
        if b - a < REFINE_TOLERANCE {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = probe(c, &mut best);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = probe(d, &mut best);
        }
    }

    Peak {
        location: best.0,
        height: best.1,
        refined: true,
        ..*peak
    }
}

/// (T̃, T) over a (Δ, L) grid: one spectrum per spacing.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationSweep {
    pub spacings: Vec<f64>,
    pub columns: Vec<SpectrumResult>,
}

impl SeparationSweep {
    /// Long-format cells `(delta, spacing, intensities)`, spacing-major.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, &Result<Intensities, SolveError>)> {
        self.spacings
            .iter()
            .zip(&self.columns)
            .flat_map(|(&l, col)| {
                col.deltas
                    .iter()
                    .zip(&col.rows)
                    .map(move |(&d, r)| (d, l, r))
            })
    }
}

/// Re-derives phases and the DDI matrix at each spacing (nm) and scans `grid`.
pub fn sweep_separation(
    config: &SystemConfig,
    spacings: &[f64],
    grid: &[f64],
) -> Result<SeparationSweep, SpectraError> {
    check_grid(grid)?;
    if let Some(&bad) = spacings.iter().find(|&&l| !(l > 0.0)) {
        return Err(SpectraError::NonPositiveSpacing(bad));
    }
    let column = |&l: &f64| -> Result<SpectrumResult, SpectraError> {
        let ladder = Ladder::new(config.clone().with_spacing(l))?;
        ladder.scan(grid)
    };
    #[cfg(feature = "parallel")]
    let columns = {
        use rayon::prelude::*;
        spacings
            .par_iter()
            .map(column)
            .collect::<Result<Vec<_>, _>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let columns = spacings.iter().map(column).collect::<Result<Vec<_>, _>>()?;
    Ok(SeparationSweep {
        spacings: spacings.to_vec(),
        columns,
    })
}

/// Routing figures of merit for one chain length.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScalingRecord {
    pub n: usize,
    /// Maximum rightward rectification T̃.
    pub tt_max: f64,
    /// Refined detuning of `tt_max` (Γ0).
    pub delta_star: f64,
    /// Minimum lower-waveguide transmission over the evaluated points.
    pub t_min: f64,
    /// Lower-waveguide transmission at `delta_star`.
    pub t_bar_min: f64,
    /// 1 − T − R − T̃ − R̃ at `delta_star`.
    pub loss_at_peak: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScalingReport {
    /// Detuning window searched.
    pub window: UniformGrid,
    pub records: Vec<ScalingRecord>,
}

/// Rebuilds the chain for each N, scans `grid`, and extracts T̃_max (refined),
/// T_min and T at the T̃_max location.
pub fn scale_emitters(
    config: &SystemConfig,
    n_list: &[usize],
    grid: UniformGrid,
) -> Result<ScalingReport, SpectraError> {
    if n_list.is_empty() {
        return Err(SpectraError::EmptyEmitterList);
    }
    let mut prev = 0;
    for &n in n_list {
        if n <= prev {
            return Err(SpectraError::NonAscendingEmitters(n, prev));
        }
        prev = n;
    }
    let deltas = grid.values();

    let records = n_list
        .iter()
        .map(|&n| {
            let ladder = Ladder::new(config.clone().with_emitters(n))?;
            let result = ladder.scan(&deltas)?;
            if let Some(err) = result.first_failure() {
                return Err(SpectraError::Solve(*err));
            }
            let (index, height) = result.argmax(Channel::Tt).ok_or(SpectraError::EmptyGrid)?;
            let grid_peak = Peak {
                channel: Channel::Tt,
                location: deltas[index],
                height,
                refined: false,
                grid_index: index,
            };
            let eval = |d: f64| ladder.solve(d).ok().map(|s| s.intensities.tt);
            let peak = refine_peak(&result, &grid_peak, &eval);
            let at_peak = ladder.solve(peak.location)?.intensities;
            let t_min = result
                .channel(Channel::T)
                .into_iter()
                .fold(at_peak.t, f64::min);
            Ok(ScalingRecord {
                n,
                tt_max: at_peak.tt,
                delta_star: peak.location,
                t_min,
                t_bar_min: at_peak.t,
                loss_at_peak: at_peak.loss,
            })
        })
        .collect::<Result<Vec<_>, SpectraError>>()?;

    Ok(ScalingReport {
        window: grid,
        records,
    })
}
