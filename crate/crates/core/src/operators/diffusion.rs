//! The rescaled diffusion operator Δ + ξ·∇/2 + 1 and its shifted inverse.
//!
//! In self-similar variables the heat flow becomes this operator; it is
//! self-adjoint in the Gaussian-weighted space with spectrum {−n/2}. Mode
//! by mode it reads a ↦ a'' + a'/r − n²a/r² + (r/2)a' + a.

use super::banded::Banded;
use super::stencil;
use crate::polar::{DecayClass, GridSpec, PolarField, RadialProfile};
use crate::{Error, Result};

/// Apply the operator to a single mode-n radial part.
pub fn apply_mode(grid: &GridSpec, values: &[f64], n: u32) -> Vec<f64> {
    let lap = stencil::mode_laplacian(grid, values, n);
    let da = stencil::mode_derivative(grid, values, n);
    (0..values.len())
        .map(|i| lap[i] + 0.5 * grid.r(i) * da[i] + values[i])
        .collect()
}

/// Apply the operator to every mode of a field. Rejects inputs without a
/// Gaussian envelope: outside the weighted space the operator does not
/// make sense as used here.
pub fn apply(field: &PolarField) -> Result<PolarField> {
    if !field.decay().decays() {
        return Err(Error::DecayClass {
            op: "diffusion::apply",
            class: field.decay(),
            msg: "operator is used on Gaussian-weighted fields only".into(),
        });
    }
    let grid = field.grid();
    let mut out = PolarField::zero(grid);
    for (n, parity, prof) in field.modes() {
        let vals = apply_mode(&grid, &prof.values, n);
        out.add_mode(n, parity, RadialProfile::new(grid, vals, prof.decay)?)?;
    }
    Ok(out)
}

/// Solve (op − c)·u = rhs on a single mode for c > 0, returning a
/// Gaussian-decaying u.
///
/// The even factor b = u/rⁿ satisfies
///   b'' + (2n+1)b'/r + (r/2)b' + (1 + n/2 − c)b = rhs/rⁿ,
/// discretized with 4th-order centered stencils (even ghosts at the axis,
/// one-sided near the outer edge) and a homogeneous Dirichlet condition at
/// r_max, where the true solution is below resolution.
pub fn solve_shifted_mode(
    grid: &GridSpec,
    n: u32,
    c: f64,
    rhs: &RadialProfile,
) -> Result<RadialProfile> {
    if c <= 0.0 {
        return Err(Error::Domain(format!("shift c = {c} must be positive")));
    }
    if !rhs.decay.decays() {
        return Err(Error::DecayClass {
            op: "diffusion::solve_shifted",
            class: rhs.decay,
            msg: "right-hand side must be Gaussian-weighted".into(),
        });
    }
    let npts = grid.len();
    let h = grid.spacing();
    let f = stencil::even_factor(grid, &rhs.values, n);

    let mut m = Banded::new(npts, 5, 2);
    let mut b = vec![0.0; npts];
    let zshift = 1.0 + n as f64 / 2.0 - c;

    // Interior rows: centered 4th-order stencils with even folding.
    let d2 = [-1.0, 16.0, -30.0, 16.0, -1.0];
    let d1 = [1.0, -8.0, 0.0, 8.0, -1.0];
    for i in 0..npts - 1 {
        let r = grid.r(i);
        if i == 0 {
            // (2n+2)·b''(0) + zshift·b(0) = f(0); even second-derivative
            // stencil folded about 0.
            let w = (2.0 * n as f64 + 2.0) / (12.0 * h * h);
            m.add(0, 0, -30.0 * w + zshift);
            m.add(0, 1, 32.0 * w);
            m.add(0, 2, -2.0 * w);
            b[0] = f[0];
            continue;
        }
        b[i] = f[i];
        m.add(i, i, zshift);
        let coef1 = (2.0 * n as f64 + 1.0) / r + 0.5 * r;
        if i >= 2 && i + 2 < npts {
            for (k, off) in (-2i64..=2).enumerate() {
                let j = (i as i64 + off) as usize;
                m.add(i, j, d2[k] / (12.0 * h * h) + coef1 * d1[k] / (12.0 * h));
            }
        } else if i < 2 {
            // Fold the ghost columns by even symmetry.
            for (k, off) in (-2i64..=2).enumerate() {
                let j = (i as i64 + off).unsigned_abs() as usize;
                m.add(i, j, d2[k] / (12.0 * h * h) + coef1 * d1[k] / (12.0 * h));
            }
        } else {
            // Near the right edge: 2nd-order stencils; the solution there
            // is Gaussian-small so the local order drop is immaterial.
            m.add(i, i - 1, 1.0 / (h * h) - coef1 / (2.0 * h));
            m.add(i, i, -2.0 / (h * h));
            m.add(i, i + 1, 1.0 / (h * h) + coef1 / (2.0 * h));
        }
    }
    // Outer boundary: Dirichlet b(r_max) = 0.
    m.add(npts - 1, npts - 1, 1.0);
    b[npts - 1] = 0.0;

    let bsol = m.solve(b)?;
    let values: Vec<f64> = (0..npts)
        .map(|i| grid.r(i).powi(n as i32) * bsol[i])
        .collect();
    RadialProfile::new(*grid, values, DecayClass::GaussianWeighted)
}

/// Solve (op − c)·u = rhs for every mode of a field.
pub fn solve_shifted(field: &PolarField, c: f64) -> Result<PolarField> {
    let grid = field.grid();
    let mut out = PolarField::zero(grid);
    for (n, parity, prof) in field.modes() {
        let u = solve_shifted_mode(&grid, n, c, prof)?;
        out.add_mode(n, parity, u)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base;
    use crate::polar::{DecayClass, Parity};

    fn grid() -> GridSpec {
        GridSpec::standard()
    }

    fn sup_rel(a: &[f64], b: &[f64]) -> f64 {
        let scale = a
            .iter()
            .chain(b.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(1e-300);
        a.iter()
            .zip(b)
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
            / scale
    }

    #[test]
    fn gaussian_is_in_the_kernel() {
        let g = grid();
        let vals = g.sample(base::gaussian);
        let out = apply_mode(&g, &vals, 0);
        let sup = out.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(sup < 1e-10, "|L G| = {sup:e}");
    }

    #[test]
    fn eigenfunctions_up_to_degree_four() {
        let g = grid();
        // (mode n, Laguerre index k) has eigenvalue −(n + 2k)/2.
        for (n, k) in [(0u32, 0u32), (1, 0), (0, 1), (2, 0), (1, 1), (3, 0), (0, 2), (2, 1), (4, 0)]
        {
            let vals = g.sample(|r| base::hermite_radial(n, k, r));
            let out = apply_mode(&g, &vals, n);
            let lambda = -((n + 2 * k) as f64) / 2.0;
            let expect: Vec<f64> = vals.iter().map(|v| lambda * v).collect();
            let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let defect = out
                .iter()
                .zip(&expect)
                .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
                / scale;
            assert!(defect < 1e-9, "n = {n}, k = {k}: rel = {defect:e}");
        }
    }

    #[test]
    fn shifted_solve_recovers_gaussian() {
        let g = grid();
        let c = 2.5;
        let rhs = RadialProfile::sample(g, DecayClass::GaussianWeighted, |r| {
            -c * base::gaussian(r)
        });
        let u = solve_shifted_mode(&g, 0, c, &rhs).unwrap();
        let expect = g.sample(base::gaussian);
        assert!(sup_rel(&u.values, &expect) < 1e-9);
    }

    #[test]
    fn shifted_solve_eigenfunction_shift() {
        // rhs = (−1/2 − c)·∂₂-profile ⇒ u = that profile (eigenvalue −1/2).
        let g = grid();
        let c = 3.0;
        let rhs = RadialProfile::sample(g, DecayClass::GaussianWeighted, |r| {
            (-0.5 - c) * (-0.5 * r * base::gaussian(r))
        });
        let u = solve_shifted_mode(&g, 1, c, &rhs).unwrap();
        let expect = g.sample(|r| -0.5 * r * base::gaussian(r));
        assert!(sup_rel(&u.values, &expect) < 1e-9);
    }

    #[test]
    fn shifted_solve_matches_closed_form() {
        // (L − 3)u = r² e^{−r²/4} has the exact solution −(1/3 + r²/4)e^{−r²/4}.
        let g = grid();
        let rhs = RadialProfile::sample(g, DecayClass::GaussianWeighted, |r| {
            r * r * (-r * r / 4.0).exp()
        });
        let u = solve_shifted_mode(&g, 0, 3.0, &rhs).unwrap();
        let expect = g.sample(|r| -(1.0 / 3.0 + r * r / 4.0) * (-r * r / 4.0).exp());
        assert!(sup_rel(&u.values, &expect) < 1e-9);
    }

    #[test]
    fn polynomial_input_rejected() {
        let g = grid();
        let p = RadialProfile::sample(g, DecayClass::PolynomialGrowth, |r| r * r);
        let f = PolarField::from_mode(2, Parity::Cos, p).unwrap();
        assert!(apply(&f).is_err());
    }
}
