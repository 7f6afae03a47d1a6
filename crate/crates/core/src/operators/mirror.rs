//! Polynomial expansion of the mirror-vortex stream function.
//!
//! The stream function seen from one vortex core due to its reflected,
//! translated partner admits the expansion
//!
//!   (reflected stream)(ξ) = C·log(1/ε) + Σ_{n≥1} εⁿ Pₙ(ξ) + O(ε^{N+1}),
//!
//! where C is the vorticity mean over 2π and each Pₙ is a degree-n
//! polynomial built from the moments of the vorticity against the
//! harmonic polynomials:
//!
//!   Pₙ(ξ) = ((−1)^{n−1}/(2πn)) Σ_k C(n,k) [μᶜ_{n−k} Qᶜ_k(ξ) + μˢ_{n−k} Qˢ_k(ξ)],
//!
//! with μᶜ_m = ∫ Qᶜ_m Ω dξ and μˢ_m = ∫ Qˢ_m Ω dξ. Constant terms are
//! dropped (only gradients of the result ever enter the dynamics). Inside
//! the series algebra the operator is only ever used through this
//! expansion; exact pointwise evaluation lives in `fields2d`.

use crate::polar::{DecayClass, EpsDeltaSeries, GridSpec, Parity, PolarField, RadialProfile};
use crate::util::binomial;
use crate::{Error, Result};

/// The expansion of the mirror stream function of a single field.
#[derive(Debug, Clone)]
pub struct MirrorExpansion {
    /// Coefficient of log(1/ε): the vorticity mean over 2π. Carried
    /// symbolically; it never enters brackets (its gradient vanishes).
    pub log_coefficient: f64,
    /// Polynomial fields P₁ … P_N (index 0 is P₁), constants dropped.
    pub polynomials: Vec<PolarField>,
}

/// Moments of a polar field against the degree-m harmonic polynomials.
///
/// Only the mode (m, cos) contributes to μᶜ_m and (m, sin) to μˢ_m; for
/// m = 0 the cosine moment is the plain mean.
pub fn harmonic_moments(f: &PolarField, m: u32) -> Result<(f64, f64)> {
    let pi = std::f64::consts::PI;
    let mu_c = match f.mode(m, Parity::Cos) {
        Some(p) => {
            let angular = if m == 0 { 2.0 * pi } else { pi };
            angular * p.quad_radial(m + 1)?
        }
        None => 0.0,
    };
    let mu_s = if m == 0 {
        0.0
    } else {
        match f.mode(m, Parity::Sin) {
            Some(p) => pi * p.quad_radial(m + 1)?,
            None => 0.0,
        }
    };
    Ok((mu_c, mu_s))
}

/// Build Pₙ for a single vorticity field.
pub fn polynomial_term(grid: &GridSpec, f: &PolarField, n: u32) -> Result<PolarField> {
    if n == 0 {
        return Err(Error::Domain("the expansion starts at n = 1".into()));
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    let prefactor = sign / (two_pi * n as f64);
    let mut out = PolarField::zero(*grid);
    for k in 1..=n {
        // mode-k radial part is r^k; k = 0 would be a constant — dropped.
        let (mu_c, mu_s) = harmonic_moments(f, n - k)?;
        let c = prefactor * binomial(n as usize, k as usize);
        if mu_c != 0.0 {
            let prof = RadialProfile::sample(*grid, DecayClass::PolynomialGrowth, |r| {
                c * mu_c * r.powi(k as i32)
            });
            out.add_mode(k, Parity::Cos, prof)?;
        }
        if mu_s != 0.0 {
            let prof = RadialProfile::sample(*grid, DecayClass::PolynomialGrowth, |r| {
                c * mu_s * r.powi(k as i32)
            });
            out.add_mode(k, Parity::Sin, prof)?;
        }
    }
    Ok(out)
}

/// Expand the mirror stream function of a single vorticity field up to
/// and including ε^N.
pub fn expand_field(f: &PolarField, n_max: u32) -> Result<MirrorExpansion> {
    let grid = f.grid();
    let (mass, _, _) = f.moments();
    let mut polynomials = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        polynomials.push(polynomial_term(&grid, f, n)?);
    }
    Ok(MirrorExpansion {
        log_coefficient: mass / (2.0 * std::f64::consts::PI),
        polynomials,
    })
}

/// Expand the mirror stream function of a vorticity (ε, δ)-series: the
/// coefficient at (k_ε + n, k_δ) picks up Pₙ of the vorticity coefficient
/// at (k_ε, k_δ). Accuracy of the moment quadratures degrades for very
/// high harmonic moments, so the order is capped.
pub const MAX_EXPANSION_ORDER: u32 = 16;

pub fn expand_series(omega: &EpsDeltaSeries, n_max: u32) -> Result<EpsDeltaSeries> {
    if n_max > MAX_EXPANSION_ORDER {
        return Err(Error::Domain(format!(
            "expansion order {n_max} beyond the moment-quadrature accuracy budget ({MAX_EXPANSION_ORDER})"
        )));
    }
    let mut out = EpsDeltaSeries::new(omega.grid(), omega.order_eps(), omega.order_delta());
    for ((ke, kd), field) in omega.iter() {
        let up_to = n_max.min((omega.order_eps().saturating_sub(ke)) as u32);
        for n in 1..=up_to {
            let p = polynomial_term(&omega.grid(), field, n)?;
            out.add_term(ke + n as usize, kd, &p, 1.0)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base;

    fn gaussian_field(g: GridSpec) -> PolarField {
        PolarField::from_mode(
            0,
            Parity::Cos,
            RadialProfile::sample(g, DecayClass::GaussianWeighted, base::gaussian),
        )
        .unwrap()
    }

    #[test]
    fn leading_polynomial_of_unit_mass() {
        // P₁ = ξ₁/2π (+ dropped constant) for the Gaussian vortex.
        let g = GridSpec::standard();
        let exp = expand_field(&gaussian_field(g), 3).unwrap();
        let two_pi = 2.0 * std::f64::consts::PI;
        assert!((exp.log_coefficient - 1.0 / two_pi).abs() < 1e-12);
        let p1 = &exp.polynomials[0];
        let a = p1.mode(1, Parity::Cos).expect("ξ₁ term");
        for i in [10usize, 100, 1000] {
            assert!((a.values[i] - g.r(i) / two_pi).abs() < 1e-12);
        }
        assert!(p1.mode(1, Parity::Sin).is_none());
    }

    #[test]
    fn second_polynomial_of_unit_mass() {
        // P₂ = −(ξ₁² − ξ₂²)/4π: mode (2, cos) with radial part −r²/4π.
        // Cross-check against direct 2-D quadrature of the defining integral.
        let g = GridSpec::standard();
        let exp = expand_field(&gaussian_field(g), 2).unwrap();
        let p2 = &exp.polynomials[1];
        let a = p2.mode(2, Parity::Cos).expect("quadratic term");
        let four_pi = 4.0 * std::f64::consts::PI;
        for i in [10usize, 100, 1000] {
            let r = g.r(i);
            assert!((a.values[i] + r * r / four_pi).abs() < 1e-10);
        }
        // Direct quadrature oracle at the point ξ = (1.3, −0.4):
        // P₂(ξ) = −(1/4π)∫ [(ξ₁+η₁)² − (ξ₂−η₂)²] Ω(η) dη, constants
        // (the η-only part) removed for comparison.
        let xi = (1.3, -0.4);
        let mut acc = 0.0;
        let h = g.spacing();
        let ntheta = 256;
        let dtheta = 2.0 * std::f64::consts::PI / ntheta as f64;
        for i in 0..g.len() {
            let r = g.r(i);
            let w = base::gaussian(r) * r * h * dtheta;
            if r > 15.0 {
                break;
            }
            for jt in 0..ntheta {
                let th = jt as f64 * dtheta;
                let eta = (r * th.cos(), r * th.sin());
                let t = (xi.0 + eta.0).powi(2) - (xi.1 - eta.1).powi(2);
                // subtract the ξ-independent part (η₁² − η₂²) to drop the constant
                let t0 = eta.0 * eta.0 - eta.1 * eta.1;
                acc += (t - t0) * w;
            }
        }
        let direct = -acc / four_pi;
        // evaluate the polynomial field at ξ
        let r = (xi.0 * xi.0 + xi.1 * xi.1).sqrt();
        let theta = xi.1.atan2(xi.0);
        // interpolate linearly: the radial part is exactly c·r², so
        // evaluate from the stored values at a node pair
        let c = a.values[100] / (g.r(100) * g.r(100));
        let val = c * r * r * (2.0 * theta).cos();
        assert!(
            (val - direct).abs() < 1e-6,
            "P₂ mismatch: field {val} vs quadrature {direct}"
        );
    }

    #[test]
    fn zero_moment_fields_have_no_low_polynomials() {
        // A pure n = 2 field has no mass and no first moments, so P₁ and
        // P₂'s gradient both vanish.
        let g = GridSpec::standard();
        let f = PolarField::from_mode(
            2,
            Parity::Cos,
            RadialProfile::sample(g, DecayClass::GaussianWeighted, |r| {
                r * r * base::g_profile(r)
            }),
        )
        .unwrap();
        let exp = expand_field(&f, 2).unwrap();
        assert_eq!(exp.log_coefficient, 0.0);
        assert!(exp.polynomials[0].is_zero());
        assert!(exp.polynomials[1].is_zero());
    }
}
