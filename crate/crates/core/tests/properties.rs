//! Cross-module property checks that tie independent evaluation routes
//! together at concrete parameters.

use dipole_core::energy::{coercivity_report, WeightParams};
use dipole_core::expansion::{
    gaussian_speed, remainder_series, zeta_direct, zeta_series, BundleBuilder,
};
use dipole_core::polar::{GridSpec, Parity};
use dipole_core::util::{log_log_slope, log_space};

#[test]
fn speed_factor_series_matches_direct_integral_at_bundle_order() {
    // |series − direct| shrinks at the bundle's order in ε.
    let bundle = BundleBuilder::standard().build(2).expect("bundle");
    let eps_list = log_space(0.02, 0.1, 5);
    let mut diffs = Vec::new();
    for &eps in &eps_list {
        let s = zeta_series(&bundle, eps, 0.0);
        let d = zeta_direct(&bundle, eps, 0.0).expect("direct");
        diffs.push((s - d).abs());
    }
    let slope = log_log_slope(&eps_list, &diffs);
    assert!(slope >= 2.0 - 0.3, "fitted slope {slope}");
    // and the series value at ε = 0 is exactly the point-vortex factor
    assert_eq!(zeta_series(&bundle, 0.0, 0.0), 1.0);
}

#[test]
fn direct_speed_integral_of_bare_bundle_is_the_pair_integral() {
    // With the order-0 bundle the direct speed integral is the bare-pair
    // quadrature up to interpolation accuracy.
    let bundle = BundleBuilder::standard().build(0).expect("bundle");
    for eps in [0.05, 0.1] {
        let direct = zeta_direct(&bundle, eps, 0.0).expect("direct");
        let bare = 2.0 * std::f64::consts::PI * gaussian_speed(eps).expect("speed");
        assert!(
            (direct - bare).abs() < 1e-9,
            "eps = {eps}: {direct} vs {bare}"
        );
    }
}

#[test]
fn remainder_series_moments_vanish_identically() {
    // Mass and horizontal moment of every retained defect coefficient
    // vanish; the vertical moment of the leading ones is absorbed by the
    // speed shift during construction.
    let bundle = BundleBuilder::standard().build(3).expect("bundle");
    let rem = remainder_series(&bundle).expect("series");
    for ((ke, kd), field) in rem.series.iter() {
        let (mass, m1, _) = field.moments();
        let scale = field.max_abs().max(1e-300) * 10.0;
        assert!(
            mass.abs() < 1e-9 * scale,
            "mass of coefficient ({ke},{kd}) = {mass:e}"
        );
        assert!(
            m1.abs() < 1e-9 * scale,
            "m1 of coefficient ({ke},{kd}) = {m1:e}"
        );
    }
}

#[test]
fn parity_ledger_of_the_bundle() {
    // Inviscid profiles even in ξ₂ (cos modes), viscous corrections odd
    // (sin modes), at every constructed order.
    let bundle = BundleBuilder::standard().build(4).expect("bundle");
    for k in 2..=4 {
        let oe = bundle.omega_e(k);
        assert!(
            oe.odd_in_xi2_part().max_abs() <= 1e-12 * oe.max_abs().max(1e-300),
            "order {k} inviscid profile has odd content"
        );
        let ons = bundle.omega_ns(k);
        if !ons.is_zero() {
            assert!(
                ons.even_in_xi2_part().max_abs() <= 1e-12 * ons.max_abs(),
                "order {k} viscous correction has even content"
            );
        }
    }
    // and the leading defect of the series is odd in ξ₂
    let rem = remainder_series(&bundle).expect("series");
    let lead = &rem.leading_e;
    assert!(lead.even_in_xi2_part().max_abs() <= 1e-7 * lead.max_abs());
}

#[test]
fn mirror_coupling_of_perturbations_decays_in_eps() {
    // The image part of the energy's quadratic form is a higher-order
    // correction: its measured ratio against the weighted norm decays at
    // least quadratically in ε.
    let bundle = BundleBuilder::standard().build(2).expect("bundle");
    let params = WeightParams::standard();
    let eps_list = [0.03, 0.06, 0.12];
    let mut ratios = Vec::new();
    for &eps in &eps_list {
        let rep = coercivity_report(&bundle, params, eps, 4, 11).expect("report");
        ratios.push(rep.mirror_coupling_ratio.max(1e-300));
    }
    let slope = log_log_slope(&eps_list, &ratios);
    assert!(slope >= 2.0, "mirror coupling slope {slope}");
}

#[test]
fn deformation_profile_moments() {
    // The quadrupole carries no mass and no first moments by angular
    // orthogonality, and its quartic radial moment is the propulsion
    // constant.
    let bundle = BundleBuilder::standard().build(2).expect("bundle");
    let omega2 = bundle.omega_e(2);
    assert_eq!(omega2.moments(), (0.0, 0.0, 0.0));
    assert!(omega2.mode(2, Parity::Cos).is_some());
    let _ = GridSpec::standard();
}
