//! The advection operator obtained by linearizing transport at the
//! Gaussian vortex, and its mode-wise inversion.
//!
//! On a mode-n field the operator acts as
//!   w(r)cos nθ ↦ −n(v₀w + φg) sin nθ,
//!   w(r)sin nθ ↦ +n(v₀w + φg) cos nθ,
//! where φ is the stream part of w. It is skew-adjoint in the
//! Gaussian-weighted space; its kernel consists of all radial fields
//! together with the two gradient modes of the vortex profile.
//!
//! Inversion reduces, mode by mode, to the radial two-point problem
//!   −φ'' − φ'/r + (n²/r² − h)φ = b/(n v₀),          (†)
//! with φ = O(rⁿ) at the axis and O(r^{−n}) at infinity, after which
//!   w = −φh − b/(n v₀).
//! For n ≥ 2 the potential n²/r² − h is positive and (†) is solved with a
//! banded 4th-order scheme on the even factor ψ = φ/rⁿ. For n = 1 the
//! problem is resonant — φ_h = r v₀ solves the homogeneous equation — and
//! is solvable only when ∫ b r² dr = 0; reduction of order then gives the
//! solution by three nested quadratures, and the leftover kernel freedom
//! is fixed by zeroing the first moment of w.

use super::banded::Banded;
use super::biot_savart;
use super::stencil;
use crate::base;
use crate::polar::{
    cumulative_integral, DecayClass, GridSpec, Parity, PolarField, RadialProfile,
};
use crate::{Error, Result};

/// Outcome of a single-mode inversion.
#[derive(Debug, Clone)]
pub struct ModeInversion {
    pub n: u32,
    /// Parity of the *input* mode; the output carries the flipped parity.
    pub input_parity: Parity,
    /// Stream radial part φ of the solution.
    pub phi: RadialProfile,
    /// Vorticity radial part w of the solution (before the parity map).
    pub w: RadialProfile,
    /// Residual of the outer boundary condition, relative to max |φ|.
    pub boundary_residual: f64,
    /// Moment defect ∫ b r² dr (meaningful for n = 1 only).
    pub solvability_defect: f64,
}

/// Apply the advection operator to a field.
pub fn apply(f: &PolarField) -> Result<PolarField> {
    if !f.decay().decays() {
        return Err(Error::DecayClass {
            op: "advection::apply",
            class: f.decay(),
            msg: "operator is used on Gaussian-weighted fields only".into(),
        });
    }
    let grid = f.grid();
    let mut out = PolarField::zero(grid);
    for (n, parity, w) in f.modes() {
        if n == 0 {
            continue; // radial fields are in the kernel
        }
        let phi = biot_savart::stream_mode(&grid, n, w)?;
        let combo: Vec<f64> = (0..grid.len())
            .map(|i| {
                let r = grid.r(i);
                n as f64 * (base::v0(r) * w.values[i] + phi.values[i] * base::g_profile(r))
            })
            .collect();
        let (sign, out_parity) = match parity {
            Parity::Cos => (-1.0, Parity::Sin),
            Parity::Sin => (1.0, Parity::Cos),
        };
        let mut prof = RadialProfile::new(grid, combo, DecayClass::GaussianWeighted)?;
        prof.scale_in_place(sign);
        out.add_mode(n, out_parity, prof)?;
    }
    Ok(out)
}

/// Tolerance on the relative n = 1 moment defect before the inversion is
/// declared unsolvable.
pub const SOLVABILITY_RTOL: f64 = 1e-10;

/// Invert the operator on a single mode: find the field whose image under
/// the advection operator is b(r)·sin(nθ) (input_parity = Sin) or
/// b(r)·cos(nθ) (input_parity = Cos).
pub fn invert_mode(
    grid: &GridSpec,
    n: u32,
    input_parity: Parity,
    b: &RadialProfile,
) -> Result<ModeInversion> {
    invert_mode_scaled(grid, n, input_parity, b, b.max_abs())
}

/// Like [`invert_mode`], but with the n = 1 solvability defect measured
/// against an explicit field scale (used when the mode is one component
/// of a larger field, so that rounding-level modes are not held to a
/// tolerance tighter than the data they came from).
pub fn invert_mode_scaled(
    grid: &GridSpec,
    n: u32,
    input_parity: Parity,
    b: &RadialProfile,
    scale_hint: f64,
) -> Result<ModeInversion> {
    if n == 0 {
        return Err(Error::Domain(
            "mode 0 lies in the kernel; no inversion exists".into(),
        ));
    }
    if !b.decay.decays() {
        return Err(Error::DecayClass {
            op: "advection::invert_mode",
            class: b.decay,
            msg: "right-hand side must decay".into(),
        });
    }
    grid.check_same(&b.grid, "invert_mode")?;

    let mut b_work = b.clone();
    let mut defect = 0.0;
    if n == 1 {
        defect = b.quad_radial(2)?;
        let scale = scale_hint.max(b.max_abs()).max(1e-300) * grid.r_max().powi(3);
        if defect.abs() > SOLVABILITY_RTOL * scale {
            return Err(Error::Solvability {
                defect,
                tol: SOLVABILITY_RTOL * scale,
            });
        }
        // Remove the residual moment exactly: r·g has ∫ r³ g dr = 1/π.
        let pi = std::f64::consts::PI;
        for (i, v) in b_work.values.iter_mut().enumerate() {
            let r = grid.r(i);
            *v -= defect * pi * r * base::g_profile(r);
        }
    }

    let (phi, boundary_residual) = if n == 1 {
        (solve_mode_one(grid, &b_work), 0.0)
    } else {
        solve_bvp(grid, n, &b_work)?
    };

    // w = −φh − b/(n v₀)
    let w_vals: Vec<f64> = (0..grid.len())
        .map(|i| {
            let r = grid.r(i);
            -phi.values[i] * base::h_profile(r) - b_work.values[i] / (n as f64 * base::v0(r))
        })
        .collect();
    let mut w = RadialProfile::new(*grid, w_vals, DecayClass::GaussianWeighted)?;
    let mut phi = phi;

    if n == 1 {
        // Canonical representative: zero first moment. Add β·(w_h, φ_h)
        // with the kernel pair (w_h, φ_h) = (−r·g, r·v₀); since
        // ∫ w_h r² dr = −1/π, the choice β = π·∫ w r² dr zeroes the moment.
        let m = w.quad_radial(2)?;
        let pi = std::f64::consts::PI;
        let beta = m * pi;
        for (i, v) in w.values.iter_mut().enumerate() {
            let r = grid.r(i);
            *v -= beta * r * base::g_profile(r);
        }
        for (i, v) in phi.values.iter_mut().enumerate() {
            let r = grid.r(i);
            *v += beta * base::speed0(r);
        }
    }

    Ok(ModeInversion {
        n,
        input_parity,
        phi,
        w,
        boundary_residual,
        solvability_defect: defect,
    })
}

impl ModeInversion {
    /// The solution as a polar field (parity flipped, sign per the mode
    /// algebra: sin input → +w·cos, cos input → −w·sin).
    pub fn solution_field(&self, grid: &GridSpec) -> Result<PolarField> {
        let (sign, parity) = match self.input_parity {
            Parity::Sin => (1.0, Parity::Cos),
            Parity::Cos => (-1.0, Parity::Sin),
        };
        let mut prof = self.w.clone();
        prof.scale_in_place(sign);
        PolarField::from_mode(self.n, parity, prof.clone()).and_then(|f| {
            grid.check_same(&f.grid(), "solution_field")?;
            Ok(f)
        })
    }

    /// The stream part of the solution as a polar field.
    pub fn stream_field(&self, grid: &GridSpec) -> Result<PolarField> {
        let (sign, parity) = match self.input_parity {
            Parity::Sin => (1.0, Parity::Cos),
            Parity::Cos => (-1.0, Parity::Sin),
        };
        let mut prof = self.phi.clone();
        prof.scale_in_place(sign);
        let mut f = PolarField::zero(*grid);
        f.add_mode(self.n, parity, prof)?;
        Ok(f)
    }
}

/// Invert the operator on every non-radial mode of a field. The input
/// must have no radial component (project it off first).
pub fn invert(field: &PolarField) -> Result<(PolarField, PolarField, Vec<ModeInversion>)> {
    let grid = field.grid();
    if field.mode(0, Parity::Cos).is_some() {
        return Err(Error::Domain(
            "input has a radial component, which is not in the operator's range".into(),
        ));
    }
    let mut omega = PolarField::zero(grid);
    let mut psi = PolarField::zero(grid);
    let mut reports = Vec::new();
    let field_scale = field.max_abs();
    for (n, parity, b) in field.modes() {
        let inv = invert_mode_scaled(&grid, n, parity, b, field_scale)?;
        omega.add_scaled(&inv.solution_field(&grid)?, 1.0)?;
        psi.add_scaled(&inv.stream_field(&grid)?, 1.0)?;
        reports.push(inv);
    }
    Ok((omega, psi, reports))
}

/// Banded 4th-order solve of (†) for n ≥ 2, on the even factor ψ = φ/rⁿ:
///   −ψ'' − (2n+1)ψ'/r − hψ = b/(n v₀ rⁿ),
/// with even symmetry at the axis and the decay condition
/// ψ' + (2n/r)ψ = 0 at r_max (exact for the r^{−n} branch).
fn solve_bvp(grid: &GridSpec, n: u32, b: &RadialProfile) -> Result<(RadialProfile, f64)> {
    let npts = grid.len();
    let h = grid.spacing();
    let nf = n as f64;

    // Right-hand side on the even factor.
    let b_even = stencil::even_factor(grid, &b.values, n);
    let mut rhs: Vec<f64> = (0..npts)
        .map(|i| {
            let r = grid.r(i);
            b_even[i] / (nf * base::v0(r))
        })
        .collect();

    let d2 = [-1.0, 16.0, -30.0, 16.0, -1.0];
    let d1 = [1.0, -8.0, 0.0, 8.0, -1.0];
    let mut m = Banded::new(npts, 5, 2);

    for i in 0..npts - 1 {
        let r = grid.r(i);
        let hr = base::h_profile(r);
        if i == 0 {
            // −(2n+2)ψ''(0) − h(0)ψ(0) = rhs(0)
            let w = -(2.0 * nf + 2.0) / (12.0 * h * h);
            m.add(0, 0, -30.0 * w - hr);
            m.add(0, 1, 32.0 * w);
            m.add(0, 2, -2.0 * w);
            continue;
        }
        m.add(i, i, -hr);
        let coef1 = -(2.0 * nf + 1.0) / r;
        if i >= 2 && i + 2 < npts {
            for (k, off) in (-2i64..=2).enumerate() {
                let j = (i as i64 + off) as usize;
                m.add(i, j, -d2[k] / (12.0 * h * h) + coef1 * d1[k] / (12.0 * h));
            }
        } else if i < 2 {
            for (k, off) in (-2i64..=2).enumerate() {
                let j = (i as i64 + off).unsigned_abs() as usize;
                m.add(i, j, -d2[k] / (12.0 * h * h) + coef1 * d1[k] / (12.0 * h));
            }
        } else {
            // second-order fallback one node from the edge
            m.add(i, i - 1, -1.0 / (h * h) - coef1 / (2.0 * h));
            m.add(i, i, 2.0 / (h * h));
            m.add(i, i + 1, -1.0 / (h * h) + coef1 / (2.0 * h));
        }
    }
    // Robin row: ψ'(R) + (2n/R)ψ(R) = 0 with a one-sided 4th-order stencil.
    let last = npts - 1;
    let r_out = grid.r(last);
    let one_sided = [3.0, -16.0, 36.0, -48.0, 25.0];
    for (k, c) in one_sided.iter().enumerate() {
        m.add(last, last - 4 + k, c / (12.0 * h));
    }
    m.add(last, last, 2.0 * nf / r_out);
    rhs[last] = 0.0;

    let psi = m.solve(rhs)?;

    // Residual of the decay condition, measured after the solve with the
    // same stencil (should be at rounding level) plus the relative size of
    // the last value against the interior maximum as a sanity indicator.
    let mut dpsi_end = 0.0;
    for (k, c) in one_sided.iter().enumerate() {
        dpsi_end += c * psi[last - 4 + k] / (12.0 * h);
    }
    let scale = psi.iter().fold(0.0f64, |mx, v| mx.max(v.abs())).max(1e-300);
    let boundary_residual = (dpsi_end + 2.0 * nf / r_out * psi[last]).abs() / scale;

    let phi_vals: Vec<f64> = (0..npts).map(|i| grid.r(i).powi(n as i32) * psi[i]).collect();
    Ok((
        RadialProfile::new(*grid, phi_vals, DecayClass::Bounded)?,
        boundary_residual,
    ))
}

/// n = 1 resonant solve by reduction of order: with φ_h = r v₀ the
/// homogeneous solution, φ = φ_h·χ where
///   χ(r) = −∫₀^r B(s)/(s³ v₀(s)²) ds,   B(s) = ∫₀^s u² b(u) du.
/// Under the zero-moment condition B decays and χ has a finite limit, so
/// φ = O(r) at the axis and O(1/r) at infinity.
fn solve_mode_one(grid: &GridSpec, b: &RadialProfile) -> RadialProfile {
    let npts = grid.len();
    let big_b = b.cumulative_weighted(2);
    let integrand: Vec<f64> = (0..npts)
        .map(|i| {
            let r = grid.r(i);
            if i == 0 {
                0.0 // B ~ r⁴ near the axis kills the 1/r³
            } else {
                big_b[i] / (r.powi(3) * base::v0(r) * base::v0(r))
            }
        })
        .collect();
    let chi = cumulative_integral(&integrand, grid.spacing());
    let vals: Vec<f64> = (0..npts)
        .map(|i| -base::speed0(grid.r(i)) * chi[i])
        .collect();
    RadialProfile::new(*grid, vals, DecayClass::Bounded).expect("grid matches")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base;

    fn grid() -> GridSpec {
        GridSpec::standard()
    }

    #[test]
    fn radial_fields_are_in_the_kernel() {
        let g = grid();
        let f = PolarField::from_mode(
            0,
            Parity::Cos,
            RadialProfile::sample(g, DecayClass::GaussianWeighted, base::gaussian),
        )
        .unwrap();
        let out = apply(&f).unwrap();
        assert!(out.max_abs() == 0.0);
    }

    #[test]
    fn gradient_modes_are_in_the_kernel() {
        // ∂₁G and ∂₂G: radial part −r·g at n = 1.
        let g = grid();
        for parity in [Parity::Cos, Parity::Sin] {
            let f = PolarField::from_mode(
                1,
                parity,
                RadialProfile::sample(g, DecayClass::GaussianWeighted, |r| {
                    -r * base::g_profile(r)
                }),
            )
            .unwrap();
            let out = apply(&f).unwrap();
            let rel = out.max_abs() / f.max_abs();
            assert!(rel < 1e-9, "kernel defect {rel:e}");
        }
    }

    #[test]
    fn skew_symmetry_in_weighted_space() {
        let g = grid();
        let mk = |n: u32, p: Parity, k: u32| {
            PolarField::from_mode(
                n,
                p,
                RadialProfile::sample(g, DecayClass::GaussianWeighted, |r| {
                    base::hermite_radial(n, k, r)
                }),
            )
            .unwrap()
        };
        let mut f = mk(2, Parity::Cos, 0);
        f.add_scaled(&mk(1, Parity::Sin, 1), 0.7).unwrap();
        let mut h = mk(2, Parity::Sin, 1);
        h.add_scaled(&mk(3, Parity::Cos, 0), -0.4).unwrap();
        let lf = apply(&f).unwrap();
        let lh = apply(&h).unwrap();
        let s = lf.weighted_inner(&h).unwrap() + f.weighted_inner(&lh).unwrap();
        let scale = lf.weighted_norm().unwrap() * h.weighted_norm().unwrap();
        assert!(s.abs() / scale < 1e-9, "skew defect {:e}", s.abs() / scale);
    }

    #[test]
    fn parity_transport() {
        // Even-in-ξ₂ (cos) input maps to odd (sin) output and back.
        let g = grid();
        let f = PolarField::from_mode(
            2,
            Parity::Cos,
            RadialProfile::sample(g, DecayClass::GaussianWeighted, |r| {
                base::hermite_radial(2, 1, r)
            }),
        )
        .unwrap();
        let out = apply(&f).unwrap();
        assert!(out.even_in_xi2_part().max_abs() == 0.0);
        assert!(out.odd_in_xi2_part().max_abs() > 0.0);
    }

    #[test]
    fn invert_zero_is_zero() {
        let g = grid();
        let inv = invert_mode(&g, 2, Parity::Sin, &RadialProfile::zeros(g)).unwrap();
        assert!(inv.w.max_abs() < 1e-300);
        assert!(inv.phi.max_abs() < 1e-300);
    }

    #[test]
    fn roundtrip_mode_two() {
        // b = r² g/(2π) at (2, sin) — the input that drives the leading
        // core deformation. Check apply(invert(b)) = b.
        let g = grid();
        let b = RadialProfile::sample(g, DecayClass::GaussianWeighted, |r| {
            r * r * base::g_profile(r) / (2.0 * std::f64::consts::PI)
        });
        let input = PolarField::from_mode(2, Parity::Sin, b.clone()).unwrap();
        let inv = invert_mode(&g, 2, Parity::Sin, &b).unwrap();
        assert!(inv.boundary_residual < 1e-8);
        let sol = inv.solution_field(&g).unwrap();
        let back = apply(&sol).unwrap();
        let mut diff = back.clone();
        diff.add_scaled(&input, -1.0).unwrap();
        let rel = diff.max_abs() / input.max_abs();
        assert!(rel < 1e-8, "roundtrip defect {rel:e}");
        // The deformation profile −w is positive on the whole grid.
        for i in 1..g.len() - 1 {
            assert!(
                -inv.w.values[i] > 0.0,
                "deformation profile changes sign at node {i}"
            );
        }
    }

    #[test]
    fn mode_one_solvability_enforced() {
        let g = grid();
        // ∫ b r² dr ≠ 0: must be rejected.
        let b = RadialProfile::sample(g, DecayClass::GaussianWeighted, |r| {
            r * base::gaussian(r)
        });
        assert!(matches!(
            invert_mode(&g, 1, Parity::Sin, &b),
            Err(Error::Solvability { .. })
        ));
    }

    #[test]
    fn mode_one_roundtrip() {
        // b = r(r² − 8)e^{−r²/4}: ∫ b r² dr = ∫ (r⁵ − 8r³)e^{−r²/4} dr = 0.
        let g = grid();
        let b = RadialProfile::sample(g, DecayClass::GaussianWeighted, |r| {
            r * (r * r - 8.0) * (-r * r / 4.0).exp()
        });
        let moment = b.quad_radial(2).unwrap();
        assert!(moment.abs() < 1e-12, "test profile moment {moment:e}");
        let inv = invert_mode(&g, 1, Parity::Sin, &b).unwrap();
        let sol = inv.solution_field(&g).unwrap();
        let back = apply(&sol).unwrap();
        let input = PolarField::from_mode(1, Parity::Sin, b).unwrap();
        let mut diff = back.clone();
        diff.add_scaled(&input, -1.0).unwrap();
        let rel = diff.max_abs() / input.max_abs();
        assert!(rel < 1e-8, "n=1 roundtrip defect {rel:e}");
        // Canonical choice: the solution's first moment vanishes.
        let (_, m1, m2) = sol.moments();
        assert!(m1.abs() < 1e-10 && m2.abs() < 1e-10, "m1 = {m1:e}, m2 = {m2:e}");
    }
}
