//! Translation-speed functions: the self-propulsion constant α, the
//! speed factor as a series and as a direct integral, and the bare
//! Gaussian-pair speed.

use crate::fields2d::PolarSampler;
use crate::polar::{Parity, PolarField};
use crate::util::kahan_sum;
use crate::{base, Error, Result};

use super::ExpansionBundle;

/// The self-propulsion constant: α = ∫ r³ w₂(r) dr ≈ 22.24, where w₂ is
/// the positive core-deformation profile of the leading correction.
///
/// A second, independent route — the planar moment
/// (1/π)∫ (ξ₂² − ξ₁²)·(leading correction) dξ by full two-dimensional
/// quadrature — must agree to rounding; disagreement flags an
/// inconsistency in the angular bookkeeping.
pub fn propulsion_alpha(bundle: &ExpansionBundle) -> Result<f64> {
    let grid = bundle.grid();
    let w2 = bundle.deformation_profile()?;
    let h = grid.spacing();
    let vals: Vec<f64> = w2
        .iter()
        .enumerate()
        .map(|(i, v)| v * grid.r(i).powi(3))
        .collect();
    let alpha = crate::polar::integrate_values(&vals, h);

    // Independent angular route: 2-D polar quadrature of the moment
    // against ξ₂² − ξ₁² = −r²cos2θ over the full leading correction
    // (including its viscous part, whose sin2θ symmetry integrates out).
    let mut omega2 = bundle.omega_e(2).clone();
    omega2.add_scaled(bundle.omega_ns(2), 1.0)?;
    let n_theta = 64usize;
    let dtheta = 2.0 * std::f64::consts::PI / n_theta as f64;
    let mut radial_terms = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let r = grid.r(i);
        let mut ang = 0.0;
        for jt in 0..n_theta {
            let th = jt as f64 * dtheta;
            ang += -(r * r) * (2.0 * th).cos() * omega2.value_at_node(i, th);
        }
        radial_terms.push(ang * dtheta * r);
    }
    let direct = crate::polar::integrate_values(&radial_terms, h) / std::f64::consts::PI;

    let rel = (alpha - direct).abs() / alpha.abs().max(1e-300);
    if rel > 1e-8 {
        return Err(Error::Consistency(format!(
            "propulsion constant routes disagree: {alpha} vs {direct} (rel {rel:e})"
        )));
    }
    Ok(alpha)
}

/// Speed factor from the series: 1 + Σ ε^k ζ_k.
pub fn zeta_series(bundle: &ExpansionBundle, eps: f64, delta: f64) -> f64 {
    bundle.zeta_app(eps, delta)
}

/// Speed factor from the defining integral,
/// (2π/ε)·∫ ∂₁(mirror stream) · vorticity dξ, evaluated by full polar
/// quadrature with the mirror stream sampled exactly (reflected
/// interpolation with analytic tails).
pub fn zeta_direct(bundle: &ExpansionBundle, eps: f64, delta: f64) -> Result<f64> {
    let grid = bundle.grid();
    let omega = bundle.omega_app(eps, delta);
    let psi = bundle.psi_app(eps, delta);
    let sampler = PolarSampler::new(&psi);
    let n_theta = 256usize;
    let dtheta = 2.0 * std::f64::consts::PI / n_theta as f64;
    let h = grid.spacing();
    let mut radial_terms = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let r = grid.r(i);
        let mut ang_terms = Vec::with_capacity(n_theta);
        for jt in 0..n_theta {
            let th = jt as f64 * dtheta;
            let (x, y) = (r * th.cos(), r * th.sin());
            let (gx, _) = sampler.mirror_gradient(x, y, eps);
            ang_terms.push(gx * omega.value_at_node(i, th));
        }
        radial_terms.push(kahan_sum(ang_terms) * dtheta * r);
    }
    let integral = crate::polar::integrate_values(&radial_terms, h);
    Ok(2.0 * std::f64::consts::PI / eps * integral)
}

/// Vertical speed of the bare Gaussian pair in units of the point-vortex
/// speed times 1/(2π): returns −(1/ε)∫ U₂(reflected) G dξ, which tends to
/// 1/(2π) with corrections beyond all orders.
pub fn gaussian_speed(eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 0.2) {
        return Err(Error::Domain(format!(
            "gaussian_speed defined for 0 < ε ≤ 0.2; got {eps}"
        )));
    }
    let grid = crate::polar::GridSpec::standard();
    let h = grid.spacing();
    let n_theta = 512usize;
    let dtheta = 2.0 * std::f64::consts::PI / n_theta as f64;
    let mut radial_terms = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let r = grid.r(i);
        if r > 22.0 {
            break;
        }
        let gval = base::gaussian(r);
        let mut ang_terms = Vec::with_capacity(n_theta);
        for jt in 0..n_theta {
            let th = jt as f64 * dtheta;
            let (x, y) = (r * th.cos(), r * th.sin());
            // second velocity component of the Gaussian vortex at the
            // reflected-translated point
            let (px, py) = (-x - 1.0 / eps, y);
            let rho2 = px * px + py * py;
            let u2 = px / (2.0 * std::f64::consts::PI * rho2) * (-(-rho2 / 4.0).exp_m1());
            ang_terms.push(u2 * gval);
        }
        radial_terms.push(kahan_sum(ang_terms) * dtheta * r);
    }
    // pad to full length for the quadrature rule
    while radial_terms.len() < grid.len() {
        radial_terms.push(0.0);
    }
    let integral = crate::polar::integrate_values(&radial_terms, h);
    Ok(-integral / eps)
}

/// The two nonzero leading speed coefficients as a convenience: returns
/// (ζ₄ᴱ, −2πα) for comparison; they agree for a consistent bundle.
pub fn quartic_coefficient_check(bundle: &ExpansionBundle) -> Result<(f64, f64)> {
    if bundle.n_zeta() < 5 {
        return Err(Error::Domain(
            "bundle must reach order 5 to expose the quartic speed coefficient".into(),
        ));
    }
    let (z4e, _) = bundle.zeta_coefficient(4);
    let alpha = propulsion_alpha(bundle)?;
    Ok((z4e, -2.0 * std::f64::consts::PI * alpha))
}

/// Parity structure of the deformation field: the inviscid part of the
/// full vorticity at (ε, δ) should be even in ξ₂.
pub fn even_parity_defect(field: &PolarField) -> f64 {
    let scale = field.max_abs().max(1e-300);
    field
        .modes()
        .filter(|(_, p, _)| *p == Parity::Sin)
        .map(|(_, _, prof)| prof.max_abs())
        .fold(0.0, f64::max)
        / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expansion::BundleBuilder;

    #[test]
    fn alpha_is_close_to_its_reported_value() {
        let b = BundleBuilder::standard().build(2).unwrap();
        let alpha = propulsion_alpha(&b).unwrap();
        assert!(
            (alpha - 22.24).abs() < 0.23,
            "self-propulsion constant = {alpha}"
        );
    }

    #[test]
    fn gaussian_pair_speed_matches_point_vortices() {
        let two_pi = 2.0 * std::f64::consts::PI;
        let s = gaussian_speed(0.05).unwrap();
        assert!(
            (two_pi * s - 1.0).abs() < 1e-8,
            "2π·speed − 1 = {:e}",
            two_pi * s - 1.0
        );
        let s1 = gaussian_speed(0.1).unwrap();
        assert!((two_pi * s1 - 1.0).abs() < 5e-3);
        // deviation decreases with ε
        assert!((two_pi * s - 1.0).abs() <= (two_pi * s1 - 1.0).abs());
        // ε → 0 limit: Richardson pair at small ε
        let s2 = gaussian_speed(0.02).unwrap();
        assert!((two_pi * s2 - 1.0).abs() < 1e-10);
    }
}
