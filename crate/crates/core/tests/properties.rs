use chiral_ladder_core::analytic::{perfect_routing_detunings, two_chiral};
use chiral_ladder_core::spectra::{find_peaks, refine_peak};
use chiral_ladder_core::{
    ddi_coupling, ddi_matrix, derive_phases, scan, validate, Channel, DdiMatrix, DdiMode,
    Intensities, Ladder, SpectrumResult, SystemConfig, UniformGrid,
};
use proptest::prelude::*;

fn random_ddi(n: usize, values: &[f64]) -> DdiMatrix {
    let mut m = vec![0.0; n * n];
    let mut k = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            m[i * n + j] = values[k % values.len()];
            m[j * n + i] = m[i * n + j];
            k += 1;
        }
    }
    DdiMatrix::from_row_major(n, m).unwrap()
}

fn config(n: usize, rates: [f64; 4], gamma: f64, spacing: f64, lambda_sp: f64) -> SystemConfig {
    let mut c = SystemConfig::reference_chiral(n)
        .with_rates(rates[0], rates[1], rates[2], rates[3])
        .with_gamma(gamma)
        .with_spacing(spacing);
    c.lambda_sp = lambda_sp;
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lossless_flux_is_conserved(
        n in 1usize..=10,
        rates in prop::array::uniform4(0.0f64..20.0),
        spacing in 5.0f64..100.0,
        lambda_sp in 100.0f64..700.0,
        couplings in prop::collection::vec(-30.0f64..30.0, 1..46),
        delta in -100.0f64..100.0,
    ) {
        let v = validate(config(n, rates, 0.0, spacing, lambda_sp)).unwrap();
        let ladder = Ladder::with_ddi(v, random_ddi(n, &couplings)).unwrap();
        let s = ladder.solve(delta).unwrap();
        let i = s.intensities;
        prop_assert!(i.loss.abs() < 1e-9, "{i:?}");
        for x in [i.t, i.r, i.tt, i.rt] {
            prop_assert!((0.0..=1.0 + 1e-9).contains(&x));
        }
        prop_assert!(s.residual <= 1e-10);
    }

    #[test]
    fn lossy_chain_never_gains_flux(
        n in 1usize..=10,
        rates in prop::array::uniform4(0.0f64..20.0),
        gamma in 0.0f64..20.0,
        delta in -300.0f64..300.0,
    ) {
        let s = Ladder::new(config(n, rates, gamma, 32.75, 211.8)).unwrap().solve(delta).unwrap();
        prop_assert!(s.intensities.loss >= -1e-9);
    }

    #[test]
    fn chiral_chain_has_no_backflow(
        n in 1usize..=12,
        g_down in 0.0f64..20.0,
        g_up in 0.0f64..20.0,
        gamma in 0.0f64..10.0,
        delta in -200.0f64..200.0,
    ) {
        let c = config(n, [g_down, 0.0, g_up, 0.0], gamma, 32.75, 211.8).with_ddi(DdiMode::Auto);
        let s = Ladder::new(c).unwrap().solve(delta);
        prop_assume!(s.is_ok());
        let s = s.unwrap();
        prop_assert_eq!(s.intensities.r, 0.0);
        prop_assert_eq!(s.intensities.rt, 0.0);
        prop_assert!(s.r.iter().chain(&s.rt).all(|z| z.norm() == 0.0));
    }

    #[test]
    fn ddi_matrix_is_symmetric_and_translation_invariant(
        n in 1usize..=50,
        spacing in 5.0f64..100.0,
    ) {
        let v = SystemConfig::reference_chiral(n).with_spacing(spacing).validate().unwrap();
        let m = ddi_matrix(&v).unwrap();
        for i in 0..n {
            prop_assert_eq!(m.get(i, i), 0.0);
            for j in 0..n {
                prop_assert_eq!(m.get(i, j), m.get(j, i));
                if i + 1 < n && j + 1 < n {
                    prop_assert_eq!(m.get(i, j), m.get(i + 1, j + 1));
                }
            }
        }
    }

    #[test]
    fn ddi_decays_under_envelope(r in 0.05f64..1e4) {
        let j = ddi_coupling(r, std::f64::consts::FRAC_PI_2).unwrap();
        let envelope = 0.75 * (1.0 / r.powi(3) + 1.0 / r.powi(2) + 1.0 / r);
        prop_assert!(j.abs() <= envelope * (1.0 + 1e-12));
    }

    #[test]
    fn phase_is_linear_in_spacing(l in 0.1f64..500.0) {
        let one = derive_phases(l, 211.8, 655.0);
        let two = derive_phases(2.0 * l, 211.8, 655.0);
        prop_assert_eq!(two.theta, 2.0 * one.theta);
        prop_assert_eq!(two.r_step, 2.0 * one.r_step);
    }

    #[test]
    fn validation_is_idempotent(n in 1usize..40, gamma in 0.0f64..20.0, spacing in 1.0f64..200.0) {
        let v = validate(SystemConfig::reference_symmetric(n).with_gamma(gamma).with_spacing(spacing)).unwrap();
        prop_assert_eq!(validate(v.config().clone()).unwrap(), v);
    }
}

fn analytic_spectrum(grid: &[f64], f: impl Fn(f64) -> f64) -> SpectrumResult {
    SpectrumResult {
        deltas: grid.to_vec(),
        rows: grid
            .iter()
            .map(|&d| {
                Ok(Intensities {
                    t: 0.0,
                    r: 0.0,
                    tt: f(d),
                    rt: 0.0,
                    loss: 0.0,
                })
            })
            .collect(),
        peaks: Vec::new(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn lossless_two_emitter_peaks_sit_at_closed_form_detunings(
        ddi in 0.0f64..40.0,
        coupling in 2.0f64..20.0,
        theta in 0.0f64..std::f64::consts::PI,
    ) {
        let tt = |d: f64| two_chiral(d, coupling, 0.0, ddi, theta).unwrap().intensities().tt;
        let (lo, hi) = perfect_routing_detunings(coupling, ddi, theta).unwrap();
        let grid = UniformGrid::new(-120.0, 120.0, 2401).unwrap().values();
        let result = analytic_spectrum(&grid, tt);
        let peaks: Vec<_> = find_peaks(&result, Channel::Tt)
            .unwrap()
            .iter()
            .map(|p| refine_peak(&result, p, &|d| Some(tt(d))))
            .collect();
        let best = peaks.iter().map(|p| p.height).fold(0.0, f64::max);
        prop_assert!((best - 1.0).abs() < 1e-9);
        for target in [lo, hi] {
            let nearest = peaks
                .iter()
                .map(|p| (p.location - target).abs())
                .fold(f64::INFINITY, f64::min);
            prop_assert!(nearest < 1e-4, "target {target}, peaks {peaks:?}");
        }
    }
}

#[test]
fn far_detuned_chain_is_transparent() {
    let ladder = Ladder::new(SystemConfig::reference_chiral(30)).unwrap();
    assert!(ladder.solve(1e4).unwrap().intensities.t > 0.99);
}

#[test]
fn refinement_never_lowers_grid_height() {
    let ladder = Ladder::new(SystemConfig::reference_chiral(5)).unwrap();
    let grid = UniformGrid::new(-150.0, 150.0, 301).unwrap().values();
    let result = ladder.scan(&grid).unwrap();
    let coarse = ladder.find_peaks(&result, Channel::Tt, false).unwrap();
    let fine = ladder.find_peaks(&result, Channel::Tt, true).unwrap();
    assert_eq!(coarse.len(), fine.len());
    for (c, f) in coarse.iter().zip(&fine) {
        assert!(f.height >= c.height);
        assert!(f.refined && !c.refined);
    }
}

#[test]
fn scan_rows_are_bounded() {
    for gamma in [0.0, 6.86] {
        let c = SystemConfig::reference_symmetric(6).with_gamma(gamma);
        let v = c.validate().unwrap();
        let ddi = ddi_matrix(&v).unwrap();
        let grid = UniformGrid::new(-200.0, 200.0, 401).unwrap().values();
        let result = scan(&v, &ddi, &grid).unwrap();
        assert_eq!(result.rows.len(), grid.len());
        for row in &result.rows {
            let i = row.as_ref().unwrap();
            for x in [i.t, i.r, i.tt, i.rt] {
                assert!((0.0..=1.0 + 1e-9).contains(&x));
            }
            assert!(i.loss >= -1e-9);
            if gamma == 0.0 {
                assert!(i.loss.abs() <= 1e-9);
            }
        }
    }
}
