//! Closed-form transport amplitudes for one and two emitters.
//!
//! These are independent of the linear solve in [`crate::scattering`] and
//! serve as its oracle. All rates are in Γ0; `coupling` is the per-channel
//! emitter-waveguide rate Γ and `loss` the spontaneous emission rate γ.

use num_complex::Complex64;
use thiserror::Error;

use crate::math::{abs, cos, sin, sqrt};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative size below which a printed denominator counts as vanishing.
const DENOMINATOR_EPS: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum AnalyticError {
    #[error("coupling rate must be positive (got {0})")]
    NonPositiveCoupling(f64),
    #[error("loss rate must be non-negative (got {0})")]
    NegativeLoss(f64),
    #[error("closed form has a pole at detuning {0}")]
    Pole(f64),
}

/// Amplitudes at the four output ports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourPortAmplitudes {
    pub delta: f64,
    pub t: Complex64,
    pub r: Complex64,
    pub tt: Complex64,
    pub rt: Complex64,
}

impl FourPortAmplitudes {
    pub fn intensities(&self) -> crate::Intensities {
        crate::Intensities::from_amplitudes(self.t, self.r, self.tt, self.rt)
    }
}

fn check(coupling: f64, loss: f64) -> Result<(), AnalyticError> {
    if !(coupling > 0.0) {
        return Err(AnalyticError::NonPositiveCoupling(coupling));
    }
    if !(loss >= 0.0) {
        return Err(AnalyticError::NegativeLoss(loss));
    }
    Ok(())
}

fn sq(x: f64) -> f64 {
    x * x
}

fn vanishes(den: Complex64, scale: f64) -> bool {
    den.norm() <= DENOMINATOR_EPS * scale
}

/// One emitter coupled equally (Γ) to all four directional channels.
///
/// With x = γ − 2iΔ the printed forms are
///
/// ```text
/// t = (x³ + 2Γx² − 4Γ²x − 8Γ³) / ((x − 2Γ)(x + 2Γ)(x + 4Γ))
/// r = t̃ = r̃ = [(−2Γ(2γ − 2iΔ) + 4Δ² − γ² + 4i(γ + Γ)Δ) / (2Γx)]⁻¹
/// ```
///
/// Both have removable singularities (x = 2Γ for t, x = 0 for r); there
/// the cancelled forms t = (x + 2Γ)/(x + 4Γ), r = −2Γ/(x + 4Γ) give the limit.
pub fn single_symmetric(
    delta: f64,
    coupling: f64,
    loss: f64,
) -> Result<FourPortAmplitudes, AnalyticError> {
    check(coupling, loss)?;
    let g = coupling;
    let x = Complex64::new(loss, -2.0 * delta);
    let scale = (g + x.norm()) * (g + x.norm()) * (g + x.norm());

    let t_den = (x - 2.0 * g) * (x + 2.0 * g) * (x + 4.0 * g);
    let t = if vanishes(t_den, scale) {
        (x + 2.0 * g) / (x + 4.0 * g)
    } else {
        (x * x * x + 2.0 * g * x * x - 4.0 * g * g * x - 8.0 * g * g * g) / t_den
    };

    let inner = -2.0 * g * Complex64::new(2.0 * loss, -2.0 * delta) + 4.0 * delta * delta
        - loss * loss
        + 4.0 * I * (loss + g) * delta;
    let outer = 2.0 * g * x;
    let r = if vanishes(outer, g * (g + x.norm())) || vanishes(inner, scale / g) {
        -2.0 * g / (x + 4.0 * g)
    } else {
        outer / inner
    };

    Ok(FourPortAmplitudes {
        delta,
        t,
        r,
        tt: r,
        rt: r,
    })
}

/// One emitter coupled only to the right-moving channels, both at rate Γ:
/// t = (γ − 2iΔ)/(γ + 2Γ − 2iΔ), t̃ = −2Γ/(γ + 2Γ − 2iΔ).
pub fn single_chiral(
    delta: f64,
    coupling: f64,
    loss: f64,
) -> Result<FourPortAmplitudes, AnalyticError> {
    check(coupling, loss)?;
    let x = Complex64::new(loss, -2.0 * delta);
    let den = x + 2.0 * coupling;
    Ok(FourPortAmplitudes {
        delta,
        t: x / den,
        r: ZERO,
        tt: -2.0 * coupling / den,
        rt: ZERO,
    })
}

/// Two chirally coupled emitters with direct coupling `ddi` (J) and
/// propagation phase `theta` (Θ) between them.
///
/// ```text
/// D  = 4iJ² + 8e^{iΘ}JΓ + i(γ + 2Γ − 2iΔ)²
/// t₂ = [8iJΓ sinΘ + i(4J² + γ² + 4Γ² − 4iγΔ − 4Δ²)] / D
/// t̃₂ = [−4e^{−iΘ}JΓ(1 + e^{2iΘ}) − 4Γ(iγ + 2Δ)] / D
/// ```
///
/// With equal up/down rates t₂ = 1 + t̃₂ holds identically.
pub fn two_chiral(
    delta: f64,
    coupling: f64,
    loss: f64,
    ddi: f64,
    theta: f64,
) -> Result<FourPortAmplitudes, AnalyticError> {
    check(coupling, loss)?;
    let (g, j) = (coupling, ddi);
    let e = Complex64::from_polar(1.0, theta);
    let x = Complex64::new(loss + 2.0 * g, -2.0 * delta);
    let den = 4.0 * I * j * j + 8.0 * e * j * g + I * x * x;
    let scale = sq(abs(j) + g + loss + abs(delta));
    if vanishes(den, scale) {
        return Err(AnalyticError::Pole(delta));
    }
    let t_num = 8.0 * I * j * g * sin(theta)
        + I * Complex64::new(
            4.0 * j * j + loss * loss + 4.0 * g * g - 4.0 * delta * delta,
            -4.0 * loss * delta,
        );
    let tt_num =
        -4.0 * e.conj() * j * g * (1.0 + e * e) - 4.0 * g * Complex64::new(2.0 * delta, loss);
    Ok(FourPortAmplitudes {
        delta,
        t: t_num / den,
        r: ZERO,
        tt: tt_num / den,
        rt: ZERO,
    })
}

/// Two lossless emitters without direct coupling:
/// t₂ = (Γ² − Δ²)/(Γ − iΔ)², t̃₂ = 2iΓΔ/(Γ − iΔ)².
pub fn two_chiral_lossless_uncoupled(
    delta: f64,
    coupling: f64,
) -> Result<FourPortAmplitudes, AnalyticError> {
    check(coupling, 0.0)?;
    let base = Complex64::new(coupling, -delta);
    let den = base * base;
    Ok(FourPortAmplitudes {
        delta,
        t: Complex64::new(coupling * coupling - delta * delta, 0.0) / den,
        r: ZERO,
        tt: 2.0 * I * coupling * delta / den,
        rt: ZERO,
    })
}

/// Two lossy emitters without direct coupling:
/// t₂ = (γ² + 4Γ² − 4iγΔ − 4Δ²)/(γ + 2Γ − 2iΔ)², t̃₂ = −4Γ(γ − 2iΔ)/(γ + 2Γ − 2iΔ)².
pub fn two_chiral_uncoupled(
    delta: f64,
    coupling: f64,
    loss: f64,
) -> Result<FourPortAmplitudes, AnalyticError> {
    check(coupling, loss)?;
    let g = coupling;
    let base = Complex64::new(loss + 2.0 * g, -2.0 * delta);
    let den = base * base;
    let t_num = Complex64::new(
        loss * loss + 4.0 * g * g - 4.0 * delta * delta,
        -4.0 * loss * delta,
    );
    Ok(FourPortAmplitudes {
        delta,
        t: t_num / den,
        r: ZERO,
        tt: -4.0 * g * Complex64::new(loss, -2.0 * delta) / den,
        rt: ZERO,
    })
}

/// Two lossless emitters with direct coupling J:
///
/// ```text
/// D  = iJ² + 2e^{iΘ}JΓ + i(Γ − iΔ)²
/// t₂ = i(2JΓ sinΘ + J² + Γ² − Δ²) / D
/// t̃₂ = −2Γ(J cosΘ + Δ) / D
/// ```
pub fn two_chiral_lossless(
    delta: f64,
    coupling: f64,
    ddi: f64,
    theta: f64,
) -> Result<FourPortAmplitudes, AnalyticError> {
    check(coupling, 0.0)?;
    let (g, j) = (coupling, ddi);
    let den = I * j * j
        + 2.0 * Complex64::from_polar(1.0, theta) * j * g
        + I * Complex64::new(g, -delta) * Complex64::new(g, -delta);
    if vanishes(den, sq(abs(j) + g + abs(delta))) {
        return Err(AnalyticError::Pole(delta));
    }
    Ok(FourPortAmplitudes {
        delta,
        t: I * (2.0 * j * g * sin(theta) + j * j + g * g - delta * delta) / den,
        r: ZERO,
        tt: Complex64::new(-2.0 * g * (j * cos(theta) + delta), 0.0) / den,
        rt: ZERO,
    })
}

/// Detunings ±√(J² + Γ² + 2JΓ sinΘ) where two lossless emitters route
/// perfectly. `None` when the radicand is negative.
pub fn perfect_routing_detunings(coupling: f64, ddi: f64, theta: f64) -> Option<(f64, f64)> {
    let radicand = ddi * ddi + coupling * coupling + 2.0 * ddi * coupling * sin(theta);
    (radicand >= 0.0).then(|| {
        let d = sqrt(radicand);
        (-d, d)
    })
}

/// Detuning −J cosΘ where lossless two-emitter rectification vanishes.
pub fn rectification_null(ddi: f64, theta: f64) -> f64 {
    -ddi * cos(theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    const G: f64 = 11.03;
    const LOSS: f64 = 6.86;

    fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
        (0..n).map(move |k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn symmetric_lossless_resonance() {
        let a = single_symmetric(0.0, G, 0.0).unwrap();
        assert!(close(a.t, Complex64::new(0.5, 0.0), 1e-15));
        assert!(close(a.r, Complex64::new(-0.5, 0.0), 1e-15));
        let i = a.intensities();
        assert!((i.t - 0.25).abs() < 1e-15 && (i.tt - 0.25).abs() < 1e-15);
    }

    #[test]
    fn symmetric_lossy_resonance() {
        // t = (γ+2Γ)/(γ+4Γ), r = −2Γ/(γ+4Γ) at Δ = 0.
        let i = single_symmetric(0.0, G, LOSS).unwrap().intensities();
        assert!((i.t - 0.3218080583297845).abs() < 1e-12);
        assert!((i.r - 0.18724548477152634).abs() < 1e-12);
        assert_eq!(i.r, i.tt);
        assert_eq!(i.r, i.rt);
    }

    #[test]
    fn symmetric_removable_singularity_in_t() {
        // γ = 2Γ, Δ = 0 zeroes the printed t denominator.
        let at = single_symmetric(0.0, G, 2.0 * G).unwrap();
        let near = single_symmetric(1e-7, G, 2.0 * G).unwrap();
        assert!(close(at.t, near.t, 1e-7));
    }

    #[test]
    fn symmetric_far_detuned_is_transparent() {
        let a = single_symmetric(1e6, G, LOSS).unwrap();
        assert!((a.t.norm() - 1.0).abs() < 1e-4);
        assert!(a.r.norm() < 1e-4);
    }

    #[test]
    fn symmetric_lossless_conserves_flux() {
        for d in grid(-100.0, 100.0, 1001) {
            let i = single_symmetric(d, G, 0.0).unwrap().intensities();
            assert!(i.loss.abs() < 1e-12, "delta {d}: {i:?}");
        }
    }

    #[test]
    fn chiral_resonance() {
        let a = single_chiral(0.0, G, 0.0).unwrap();
        assert_eq!(a.t, ZERO);
        assert_eq!(a.tt, Complex64::new(-1.0, 0.0));
        assert!((a.tt.arg().abs() - PI).abs() < 1e-15);

        let lossy = single_chiral(0.0, G, LOSS).unwrap();
        // t = γ/(γ+2Γ), t̃ = −2Γ/(γ+2Γ)
        assert!((lossy.t.re - 0.23720608575380359).abs() < 1e-14);
        assert!((lossy.tt.re + 0.7627939142461964).abs() < 1e-14);
        assert!((lossy.intensities().tt - 0.5818545556110336).abs() < 1e-12);
    }

    #[test]
    fn chiral_lossless_unitarity() {
        for d in grid(-100.0, 100.0, 1001).chain([50.0]) {
            let a = single_chiral(d, G, 0.0).unwrap();
            assert!((a.t.norm_sqr() + a.tt.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_emitter_specializations_agree() {
        for theta in [0.0, 0.3 * PI, 0.9715, 2.0] {
            for d in grid(-100.0, 100.0, 1001) {
                let general = two_chiral(d, G, 0.0, 0.0, theta).unwrap();
                let eq = two_chiral_lossless_uncoupled(d, G).unwrap();
                assert!(close(general.t, eq.t, 1e-12) && close(general.tt, eq.tt, 1e-12));

                let general = two_chiral(d, G, LOSS, 0.0, theta).unwrap();
                let eq = two_chiral_uncoupled(d, G, LOSS).unwrap();
                assert!(close(general.t, eq.t, 1e-12) && close(general.tt, eq.tt, 1e-12));

                let general = two_chiral(d, G, 0.0, 23.10, theta).unwrap();
                let eq = two_chiral_lossless(d, G, 23.10, theta).unwrap();
                assert!(close(general.t, eq.t, 1e-12) && close(general.tt, eq.tt, 1e-12));
            }
        }
    }

    #[test]
    fn two_emitter_transmission_is_one_plus_rectification() {
        for d in grid(-60.0, 60.0, 241) {
            let a = two_chiral(d, G, LOSS, 23.10, 0.9715).unwrap();
            assert!(close(a.t, 1.0 + a.tt, 1e-13));
        }
    }

    #[test]
    fn two_emitter_uncoupled_peaks_at_plus_minus_coupling() {
        for d in [G, -G] {
            let i = two_chiral(d, G, 0.0, 0.0, 1.234).unwrap().intensities();
            assert!((i.tt - 1.0).abs() < 1e-12 && i.t < 1e-12);
        }
        let i = two_chiral(0.0, G, 0.0, 0.0, 1.234).unwrap().intensities();
        assert!((i.t - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_emitter_lossy_uncoupled_resonance() {
        // t₂ = (γ²+4Γ²)/(γ+2Γ)², t̃₂ = −4Γγ/(γ+2Γ)² at Δ = 0.
        let a = two_chiral(0.0, G, LOSS, 0.0, 0.5).unwrap();
        let s = (LOSS + 2.0 * G).powi(2);
        assert!(close(
            a.t,
            Complex64::new((LOSS * LOSS + 4.0 * G * G) / s, 0.0),
            1e-14
        ));
        assert!(close(a.tt, Complex64::new(-4.0 * G * LOSS / s, 0.0), 1e-14));
        assert!((a.intensities().tt - 0.1309562060132162).abs() < 1e-12);
    }

    #[test]
    fn two_emitter_ddi_peak_and_null() {
        let theta = 2.0 * PI * 32.75 / 211.8;
        let (lo, hi) = perfect_routing_detunings(G, 23.10, theta).unwrap();
        // mpmath: √(J² + Γ² + 2JΓ sinΘ) and −J cosΘ
        assert!((hi - 32.80346249430848).abs() < 1e-10);
        assert_eq!(lo, -hi);
        for d in [lo, hi] {
            let i = two_chiral(d, G, 0.0, 23.10, theta).unwrap().intensities();
            assert!((i.tt - 1.0).abs() < 1e-12);
        }
        let null = rectification_null(23.10, theta);
        assert!((null + 13.028865867550694).abs() < 1e-10);
        let i = two_chiral(null, G, 0.0, 23.10, theta)
            .unwrap()
            .intensities();
        assert!(i.tt < 1e-24);
    }

    #[test]
    fn invalid_parameters() {
        assert_eq!(
            single_chiral(0.0, 0.0, 1.0),
            Err(AnalyticError::NonPositiveCoupling(0.0))
        );
        assert_eq!(
            single_symmetric(0.0, 1.0, -1.0),
            Err(AnalyticError::NegativeLoss(-1.0))
        );
    }
}
