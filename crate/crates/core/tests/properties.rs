use membrane_cavity::fit::{fit_exponential_decay, least_squares, FitConfig, Observations};
use membrane_cavity::mechanics::{
    base_frequency, effective_mass_gaussian, effective_mass_point, mode_frequency,
    MembraneGeometry, ModeId,
};
use membrane_cavity::optics::{
    finesse_from_mirror_r, finesse_from_scan, mirror_r_from_finesse, slab_coefficients,
    CavityConfig, OpticalSlab,
};
use membrane_cavity::special::{bessel_j, bessel_root, BesselOrder, RootIndex};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn lossless_slab_conserves_energy(
        n in 1.0f64..3.0,
        ratio in 0.01f64..1.0,
        wavelength in 400e-9f64..2e-6,
    ) {
        let slab = OpticalSlab::new(n, 0.0, ratio * wavelength, 0.0).unwrap();
        let c = slab_coefficients(&slab, wavelength).unwrap();
        prop_assert!((c.r_d.norm_sqr() + c.t_d.norm_sqr() - 1.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn absorption_or_roughness_loses_energy(
        n in 1.5f64..4.0,
        thickness in 20e-9f64..1e-6,
        n_imag in 1e-7f64..1e-3,
        roughness in 1e-12f64..2e-9,
        which in 0usize..3,
    ) {
        let (ni, s) = match which {
            0 => (n_imag, 0.0),
            1 => (0.0, roughness),
            _ => (n_imag, roughness),
        };
        let slab = OpticalSlab::new(n, ni, thickness, s).unwrap();
        let c = slab_coefficients(&slab, 1064e-9).unwrap();
        // a slab of exactly half-wave thickness does not reflect, so
        // roughness alone removes nothing there
        prop_assume!(which != 1 || c.r_d.norm() > 1e-6);
        prop_assert!(c.r_d.norm_sqr() + c.t_d.norm_sqr() < 1.0);
    }

    #[test]
    fn mode_frequencies_scale_with_wave_speed(
        radius in 0.1e-3f64..5e-3,
        stress in 1e8f64..2e9,
        density in 2000.0f64..4000.0,
        m in 0u32..5,
        n in 1u32..5,
    ) {
        let g = MembraneGeometry::new(radius, radius / 1000.0, density, stress).unwrap();
        let g4 = MembraneGeometry::new(radius, radius / 1000.0, density, 4.0 * stress).unwrap();
        let mode = ModeId::new(m, n).unwrap();
        prop_assert!((mode_frequency(&g4, mode) / mode_frequency(&g, mode) - 2.0).abs() < 1e-12);
        let expected = (stress / density).sqrt() / (2.0 * std::f64::consts::PI * radius);
        prop_assert!((base_frequency(&g) / expected - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bessel_roots_are_zeros(m in 0u32..8, n in 1u32..12) {
        let a = bessel_root(BesselOrder(m), RootIndex::new(n).unwrap());
        let slope = bessel_j(BesselOrder(m + 1), a).unwrap().abs();
        prop_assert!(bessel_j(BesselOrder(m), a).unwrap().abs() < 1e-13 * slope.max(1e-3));
    }

    #[test]
    fn narrow_gaussian_readout_tends_to_point(n in 1u32..6) {
        let g = MembraneGeometry::new(0.75e-3, 100e-9, 3200.0, 1e9).unwrap();
        let idx = RootIndex::new(n).unwrap();
        let point = effective_mass_point(&g, idx);
        let gauss = effective_mass_gaussian(&g, idx, 0.75e-6).unwrap();
        prop_assert!((gauss / point - 1.0).abs() < 1e-3);
        let wide = effective_mass_gaussian(&g, idx, 0.15e-3).unwrap();
        prop_assert!(wide > point);
    }

    #[test]
    fn reflectivity_finesse_inverse(r in 0.5f64..0.999_999_9) {
        let back = mirror_r_from_finesse(finesse_from_mirror_r(r).unwrap()).unwrap();
        prop_assert!((back - r).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn absorption_lowers_finesse(
        z in -2e-2f64..2e-2,
        n_imag in 1e-7f64..2e-5,
        roughness in 0.0f64..500e-12,
    ) {
        let cav = CavityConfig::from_empty_finesse(9.03e-2, 1064e-9, 53518.0).unwrap();
        let slab = OpticalSlab::new(2.021, n_imag, 97e-9, roughness).unwrap();
        let f = finesse_from_scan(&cav, &slab, z).unwrap();
        let lossless = finesse_from_scan(&cav, &slab.lossless(), z).unwrap();
        prop_assert!(f > 1.0 && f < lossless, "{} vs {}", f, lossless);
    }
}

/// Objective is non-increasing across accepted steps for an exponential
/// fit started far from the optimum.
#[test]
fn accepted_steps_never_increase_objective() {
    let t: Vec<f64> = (0..60).map(|i| i as f64 * 0.1).collect();
    let y: Vec<f64> = t.iter().map(|t| 3.0 * (-t / 1.7).exp() + 0.2).collect();
    let fit = fit_exponential_decay(&t, &y, None, &FitConfig::default()).unwrap();
    assert!(fit.objective_history.windows(2).all(|w| w[1] <= w[0]));

    let data = Observations::new(y.clone()).unwrap();
    let fit = least_squares(
        |p| Ok(t.iter().map(|t| p[0] * (-t * p[1]).exp() + p[2]).collect()),
        &data,
        &[1.0, 3.0, -1.0],
        &FitConfig::default(),
    )
    .unwrap();
    assert!(fit.converged);
    assert!(fit.objective_history.windows(2).all(|w| w[1] <= w[0]));
}

/// Replicating a dataset N times shrinks the reported uncertainties as
/// 1/sqrt(N).
#[test]
fn sigmas_scale_with_replication() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let noise = Normal::new(0.0, 0.01).unwrap();
    let t: Vec<f64> = (0..40).map(|i| i as f64 * 0.05).collect();
    let y: Vec<f64> = t
        .iter()
        .map(|t| (-t / 0.6).exp() + noise.sample(&mut rng))
        .collect();
    let fit_n = |copies: usize| {
        let tt: Vec<f64> = (0..copies).flat_map(|_| t.iter().copied()).collect();
        let yy: Vec<f64> = (0..copies).flat_map(|_| y.iter().copied()).collect();
        let data = Observations::new(yy).unwrap();
        least_squares(
            |p| Ok(tt.iter().map(|t| p[0] * (-t / p[1]).exp() + p[2]).collect()),
            &data,
            &[0.9, 0.5, 0.0],
            &FitConfig::default(),
        )
        .unwrap()
    };
    let a = fit_n(25);
    let b = fit_n(100);
    for j in 0..3 {
        assert!((a.params[j] / b.params[j] - 1.0).abs() < 1e-8);
        let ratio = a.sigmas[j] / b.sigmas[j];
        assert!((ratio - 2.0).abs() < 0.01, "param {j}: ratio {ratio}");
    }
}
