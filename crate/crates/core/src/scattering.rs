//! Steady-state single-photon scattering off the emitter chain.
//!
//! A photon enters the lower waveguide from the left (t_0 = 1) and no other
//! port is driven (r_{N+1} = t̃_0 = r̃_{N+1} = 0). Between emitters the fields
//! are plane waves with piecewise-constant amplitudes; the jump and
//! regularisation conditions at each emitter turn the problem into 5N
//! linear equations in the unknowns
//!
//! ```text
//! [A_1..A_N, t_1..t_N, r_1..r_N, t̃_1..t̃_N, r̃_1..r̃_N]
//! ```
//!
//! For emitter j (zero-based here) at phase φ_j = jΘ with amplitude
//! couplings V = √Γ:
//!
//! ```text
//! t_j − t_{j−1}       + i V_dR e^{−iφ} A_j = 0
//! r_{j+1} − r_j       − i V_dL e^{+iφ} A_j = 0
//! t̃_j − t̃_{j−1}       + i V_uR e^{−iφ} A_j = 0
//! r̃_{j+1} − r̃_j       − i V_uL e^{+iφ} A_j = 0
//! ½V_dR e^{iφ}(t_j + t_{j−1}) + ½V_dL e^{−iφ}(r_{j+1} + r_j)
//!   + ½V_uR e^{iφ}(t̃_j + t̃_{j−1}) + ½V_uL e^{−iφ}(r̃_{j+1} + r̃_j)
//!   − (Δ + iγ_j/2) A_j + Σ_{i≠j} J_ij A_i = 0
//! ```

use alloc::vec::Vec;

use num_complex::Complex64;
use thiserror::Error;

use crate::ddi::DdiMatrix;
use crate::linalg::{relative_residual, DenseMatrix, LinalgError};
use crate::math::sqrt;
use crate::params::ValidatedConfig;

/// Largest relative residual accepted from a solve.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SolveError {
    #[error("DDI matrix is {found}x{found} but the chain has {expected} emitters")]
    Dimension { expected: usize, found: usize },
    #[error("detuning {0} is not finite")]
    NonFiniteDetuning(f64),
    #[error("scattering matrix singular at detuning {delta} (condition estimate {condition_estimate:e})")]
    Singular { delta: f64, condition_estimate: f64 },
    #[error(
        "solve at detuning {delta} rejected: relative residual {residual:e} exceeds tolerance"
    )]
    Residual { delta: f64, residual: f64 },
}

impl SolveError {
    /// Detuning at which the failure occurred, when it is tied to one.
    pub fn delta(&self) -> Option<f64> {
        match *self {
            SolveError::Singular { delta, .. } | SolveError::Residual { delta, .. } => Some(delta),
            SolveError::NonFiniteDetuning(delta) => Some(delta),
            SolveError::Dimension { .. } => None,
        }
    }
}

/// Square system `matrix · x = rhs` in the unknown ordering above.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    pub matrix: DenseMatrix,
    pub rhs: Vec<Complex64>,
}

/// Output-port intensities. `loss` is what leaks to non-guided modes.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Intensities {
    /// Lower waveguide transmission |t_N|².
    pub t: f64,
    /// Lower waveguide reflection |r_1|².
    pub r: f64,
    /// Rightward rectification into the upper waveguide |t̃_N|².
    pub tt: f64,
    /// Leftward rectification into the upper waveguide |r̃_1|².
    pub rt: f64,
    pub loss: f64,
}

impl Intensities {
    pub fn from_amplitudes(t: Complex64, r: Complex64, tt: Complex64, rt: Complex64) -> Self {
        let (t, r, tt, rt) = (t.norm_sqr(), r.norm_sqr(), tt.norm_sqr(), rt.norm_sqr());
        Self {
            t,
            r,
            tt,
            rt,
            loss: 1.0 - t - r - tt - rt,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransportSolution {
    pub delta: f64,
    /// Emitter excitation amplitudes A_j.
    pub a: Vec<Complex64>,
    pub t: Vec<Complex64>,
    pub r: Vec<Complex64>,
    pub tt: Vec<Complex64>,
    pub rt: Vec<Complex64>,
    pub intensities: Intensities,
    pub residual: f64,
}

impl TransportSolution {
    /// Output amplitudes (t_N, r_1, t̃_N, r̃_1).
    pub fn port_amplitudes(&self) -> [Complex64; 4] {
        let last = self.t.len() - 1;
        [self.t[last], self.r[0], self.tt[last], self.rt[0]]
    }
}

struct Layout {
    n: usize,
}

impl Layout {
    fn a(&self, j: usize) -> usize {
        j
    }
    fn t(&self, j: usize) -> usize {
        self.n + j
    }
    fn r(&self, j: usize) -> usize {
        2 * self.n + j
    }
    fn tt(&self, j: usize) -> usize {
        3 * self.n + j
    }
    fn rt(&self, j: usize) -> usize {
        4 * self.n + j
    }
}

/// Builds the 5N×5N system at detuning `delta` (Γ0 units).
pub fn assemble_system(
    config: &ValidatedConfig,
    ddi: &DdiMatrix,
    delta: f64,
) -> Result<LinearSystem, SolveError> {
    let n = config.n_emitters();
    if ddi.n() != n {
        return Err(SolveError::Dimension {
            expected: n,
            found: ddi.n(),
        });
    }
    if !delta.is_finite() {
        return Err(SolveError::NonFiniteDetuning(delta));
    }

    let idx = Layout { n };
    let mut m = DenseMatrix::zeros(5 * n);
    let mut rhs = alloc::vec![ZERO; 5 * n];
    // Incident amplitude t_0 in the lower waveguide.
    let t_in = Complex64::new(1.0, 0.0);

    for (j, rates) in config.emitters().iter().enumerate() {
        let phase = Complex64::from_polar(1.0, config.site_phase(j));
        let back = phase.conj();
        let v_dr = sqrt(rates.gamma_dr);
        let v_dl = sqrt(rates.gamma_dl);
        let v_ur = sqrt(rates.gamma_ur);
        let v_ul = sqrt(rates.gamma_ul);
        let last = j + 1 == n;

        // Lower right-mover jump.
        let row = j;
        m[(row, idx.t(j))] = Complex64::new(1.0, 0.0);
        if j > 0 {
            m[(row, idx.t(j - 1))] = Complex64::new(-1.0, 0.0);
        } else {
            rhs[row] = t_in;
        }
        m[(row, idx.a(j))] = I * v_dr * back;

        // Lower left-mover jump.
        let row = n + j;
        m[(row, idx.r(j))] = Complex64::new(-1.0, 0.0);
        if !last {
            m[(row, idx.r(j + 1))] = Complex64::new(1.0, 0.0);
        }
        if v_dl != 0.0 {
            m[(row, idx.a(j))] = -I * v_dl * phase;
        }

        // Upper right-mover jump (t̃_0 = 0).
        let row = 2 * n + j;
        m[(row, idx.tt(j))] = Complex64::new(1.0, 0.0);
        if j > 0 {
            m[(row, idx.tt(j - 1))] = Complex64::new(-1.0, 0.0);
        }
        m[(row, idx.a(j))] = I * v_ur * back;

        // Upper left-mover jump.
        let row = 3 * n + j;
        m[(row, idx.rt(j))] = Complex64::new(-1.0, 0.0);
        if !last {
            m[(row, idx.rt(j + 1))] = Complex64::new(1.0, 0.0);
        }
        if v_ul != 0.0 {
            m[(row, idx.a(j))] = -I * v_ul * phase;
        }

        // Emitter amplitude equation.
        let row = 4 * n + j;
        let half_dr = 0.5 * v_dr * phase;
        let half_ur = 0.5 * v_ur * phase;
        m[(row, idx.t(j))] += half_dr;
        if j > 0 {
            m[(row, idx.t(j - 1))] += half_dr;
            m[(row, idx.tt(j - 1))] += half_ur;
        } else {
            rhs[row] -= half_dr * t_in;
        }
        m[(row, idx.tt(j))] += half_ur;
        if v_dl != 0.0 {
            let half_dl = 0.5 * v_dl * back;
            m[(row, idx.r(j))] += half_dl;
            if !last {
                m[(row, idx.r(j + 1))] += half_dl;
            }
        }
        if v_ul != 0.0 {
            let half_ul = 0.5 * v_ul * back;
            m[(row, idx.rt(j))] += half_ul;
            if !last {
                m[(row, idx.rt(j + 1))] += half_ul;
            }
        }
        m[(row, idx.a(j))] -= Complex64::new(delta, 0.5 * rates.gamma);
        for (i, &coupling) in ddi.row(j).iter().enumerate() {
            if i != j && coupling != 0.0 {
                m[(row, idx.a(i))] += coupling;
            }
        }
    }

    Ok(LinearSystem { matrix: m, rhs })
}

/// Solves for every amplitude at one detuning.
pub fn solve_transport(
    config: &ValidatedConfig,
    ddi: &DdiMatrix,
    delta: f64,
) -> Result<TransportSolution, SolveError> {
    let system = assemble_system(config, ddi, delta)?;
    let n = config.n_emitters();
    let lu = system.matrix.clone().lu().map_err(|e| match e {
        LinalgError::Singular { condition_estimate } => SolveError::Singular {
            delta,
            condition_estimate,
        },
        LinalgError::Dimension { matrix, vector } => SolveError::Dimension {
            expected: matrix,
            found: vector,
        },
    })?;
    let x = lu.solve(&system.rhs).map_err(|_| SolveError::Dimension {
        expected: 5 * n,
        found: system.rhs.len(),
    })?;
    let residual = relative_residual(&system.matrix, &x, &system.rhs);
    if !(residual <= RESIDUAL_TOLERANCE) {
        return Err(SolveError::Residual { delta, residual });
    }

    let block = |k: usize| x[k * n..(k + 1) * n].to_vec();
    let (a, t, r, tt, rt) = (block(0), block(1), block(2), block(3), block(4));
    let intensities = Intensities::from_amplitudes(t[n - 1], r[0], tt[n - 1], rt[0]);
    Ok(TransportSolution {
        delta,
        a,
        t,
        r,
        tt,
        rt,
        intensities,
        residual,
    })
}

/// Solves every detuning independently; output order follows `deltas`.
///
/// With the `parallel` feature the points are evaluated on the rayon pool.
pub fn solve_batch(
    config: &ValidatedConfig,
    ddi: &DdiMatrix,
    deltas: &[f64],
) -> Vec<Result<TransportSolution, SolveError>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        deltas
            .par_iter()
            .map(|&d| solve_transport(config, ddi, d))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        deltas
            .iter()
            .map(|&d| solve_transport(config, ddi, d))
            .collect()
    }
}
