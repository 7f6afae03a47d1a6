//! The polar Poisson bracket {f, g} = ∇⊥f·∇g.
//!
//! In polar coordinates {f, g} = (1/r)(∂_r f ∂_θ g − ∂_θ f ∂_r g); on
//! angular modes the θ-products collapse into the coupled modes m±n by the
//! product-to-sum identities, so the bracket of two mode fields is exact
//! in angle and 4th-order in r.

use crate::polar::field::angular_product;
use crate::polar::{DecayClass, GridSpec, Parity, PolarField, RadialProfile};
use crate::{Error, Result};

use super::stencil;

/// d/dθ of an angular factor: amplitude and new parity.
#[inline]
fn theta_derivative(n: u32, parity: Parity) -> (f64, Parity) {
    match parity {
        Parity::Cos => (-(n as f64), Parity::Sin),
        Parity::Sin => (n as f64, Parity::Cos),
    }
}

/// Divide sampled values by r, with an even-extrapolated limit at the
/// axis for mode-0 output and an exact zero for higher modes.
fn divide_by_r(grid: &GridSpec, vals: &mut [f64], out_mode: u32) {
    for i in (1..vals.len()).rev() {
        vals[i] /= grid.r(i);
    }
    if out_mode >= 1 {
        vals[0] = 0.0;
    } else {
        // Even quartic extrapolation through nodes 1..=4.
        let s: Vec<f64> = (1..=4).map(|i| grid.r(i) * grid.r(i)).collect();
        let mut acc = 0.0;
        for j in 0..4 {
            let mut w = 1.0;
            for k in 0..4 {
                if k != j {
                    w *= s[k] / (s[k] - s[j]);
                }
            }
            acc += w * vals[j + 1];
        }
        vals[0] = acc;
    }
}

/// Poisson bracket of two polar fields.
///
/// At least one argument has to decay; the bracket of two
/// polynomial-growth fields would itself grow and is rejected.
pub fn poisson_bracket(f: &PolarField, g: &PolarField) -> Result<PolarField> {
    f.grid().check_same(&g.grid(), "poisson_bracket")?;
    if f.decay() == DecayClass::PolynomialGrowth && g.decay() == DecayClass::PolynomialGrowth {
        return Err(Error::DecayClass {
            op: "poisson_bracket",
            class: DecayClass::PolynomialGrowth,
            msg: "the bracket of two growing fields grows".into(),
        });
    }
    let grid = f.grid();
    let n_pts = grid.len();
    let mut out = PolarField::zero(grid);

    // Pre-differentiate every mode of both fields.
    let f_modes: Vec<(u32, Parity, &RadialProfile, Vec<f64>)> = f
        .modes()
        .map(|(n, p, prof)| (n, p, prof, stencil::mode_derivative(&grid, &prof.values, n)))
        .collect();
    let g_modes: Vec<(u32, Parity, &RadialProfile, Vec<f64>)> = g
        .modes()
        .map(|(n, p, prof)| (n, p, prof, stencil::mode_derivative(&grid, &prof.values, n)))
        .collect();

    for (m, pm, fa, dfa) in &f_modes {
        for (n, pn, gc, dgc) in &g_modes {
            let decay = fa.decay.product(gc.decay);
            // Term 1: ∂_r f · ∂_θ g → a'(r)c(r) with angular T_m·T_n'.
            let (amp_gt, pgt) = theta_derivative(*n, *pn);
            if amp_gt != 0.0 {
                let vals: Vec<f64> = (0..n_pts).map(|i| dfa[i] * gc.values[i]).collect();
                for (k, pk, coeff) in angular_product(*m, *pm, *n, pgt) {
                    let mut v = vals.clone();
                    for x in &mut v {
                        *x *= coeff * amp_gt;
                    }
                    divide_by_r(&grid, &mut v, k);
                    out.add_mode(k, pk, RadialProfile::new(grid, v, decay)?)?;
                }
            }
            // Term 2: −∂_θ f · ∂_r g → −a(r)c'(r) with angular T_m'·T_n.
            let (amp_ft, pft) = theta_derivative(*m, *pm);
            if amp_ft != 0.0 {
                let vals: Vec<f64> = (0..n_pts).map(|i| fa.values[i] * dgc[i]).collect();
                for (k, pk, coeff) in angular_product(*m, pft, *n, *pn) {
                    let mut v = vals.clone();
                    for x in &mut v {
                        *x *= -coeff * amp_ft;
                    }
                    divide_by_r(&grid, &mut v, k);
                    out.add_mode(k, pk, RadialProfile::new(grid, v, decay)?)?;
                }
            }
        }
    }
    out.prune(1e-300);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base;

    fn grid() -> GridSpec {
        GridSpec::standard()
    }

    fn gaussian_field(g: GridSpec) -> PolarField {
        PolarField::from_mode(
            0,
            Parity::Cos,
            RadialProfile::sample(g, DecayClass::GaussianWeighted, base::gaussian),
        )
        .unwrap()
    }

    fn stream_gaussian(g: GridSpec) -> PolarField {
        PolarField::from_mode(
            0,
            Parity::Cos,
            RadialProfile::sample(g, DecayClass::Bounded, base::stream0),
        )
        .unwrap()
    }

    fn xi1_field(g: GridSpec) -> PolarField {
        PolarField::from_mode(
            1,
            Parity::Cos,
            RadialProfile::sample(g, DecayClass::PolynomialGrowth, |r| r),
        )
        .unwrap()
    }

    #[test]
    fn bracket_of_two_radial_fields_vanishes() {
        let g = grid();
        let out = poisson_bracket(&stream_gaussian(g), &gaussian_field(g)).unwrap();
        assert!(out.max_abs() < 1e-18);
    }

    #[test]
    fn gradient_shift_identity() {
        // {ξ₁, g} = ∂₂g: with g the Gaussian vortex the result is the
        // (1, sin) mode −r·g(r)·... i.e. ∂₂G.
        let g = grid();
        let out = poisson_bracket(&xi1_field(g), &gaussian_field(g)).unwrap();
        let expect = g.sample(|r| -0.5 * r * base::gaussian(r));
        let got = out.mode(1, Parity::Sin).expect("∂₂ of a radial field is a sin mode");
        let scale = expect.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..g.len() {
            assert!((got.values[i] - expect[i]).abs() < 1e-9 * scale, "i = {i}");
        }
        assert!(out.mode(1, Parity::Cos).is_none());
    }

    #[test]
    fn stream_against_coordinate() {
        // {Ψ₀, ξ₁} = −r v₀ sinθ.
        let g = grid();
        let out = poisson_bracket(&stream_gaussian(g), &xi1_field(g)).unwrap();
        let got = out.mode(1, Parity::Sin).unwrap();
        for i in [1usize, 10, 200, 2000] {
            let expect = -base::speed0(g.r(i));
            assert!(
                (got.values[i] - expect).abs() < 1e-9,
                "i = {i}: {} vs {expect}",
                got.values[i]
            );
        }
    }

    #[test]
    fn antisymmetry_on_mode_mixtures() {
        let g = grid();
        let mut f = PolarField::zero(g);
        f.add_mode(
            1,
            Parity::Cos,
            RadialProfile::sample(g, DecayClass::GaussianWeighted, |r| {
                base::hermite_radial(1, 1, r)
            }),
        )
        .unwrap();
        f.add_mode(
            2,
            Parity::Sin,
            RadialProfile::sample(g, DecayClass::GaussianWeighted, |r| {
                base::hermite_radial(2, 0, r)
            }),
        )
        .unwrap();
        let mut h = PolarField::zero(g);
        h.add_mode(
            0,
            Parity::Cos,
            RadialProfile::sample(g, DecayClass::GaussianWeighted, |r| {
                base::hermite_radial(0, 1, r)
            }),
        )
        .unwrap();
        h.add_mode(
            3,
            Parity::Cos,
            RadialProfile::sample(g, DecayClass::GaussianWeighted, |r| {
                base::hermite_radial(3, 0, r)
            }),
        )
        .unwrap();
        let fg = poisson_bracket(&f, &h).unwrap();
        let gf = poisson_bracket(&h, &f).unwrap();
        let mut sum = fg.clone();
        sum.add_scaled(&gf, 1.0).unwrap();
        let scale = fg.max_abs().max(1e-300);
        assert!(sum.max_abs() / scale < 1e-11, "antisymmetry defect");
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(8))]
        // {f, g} = −{g, f} on random Gaussian-weighted mode mixtures.
        #[test]
        fn bracket_antisymmetry_random(seed in 0u64..1000) {
            let g = GridSpec::new(12.0, 512).unwrap();
            let mut pick = seed;
            let mut next = move || {
                pick = pick.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((pick >> 11) as f64 / (1u64 << 53) as f64) - 0.5
            };
            let mut mk = |kseed: f64| {
                let mut f = PolarField::zero(g);
                for n in 0..=3u32 {
                    for parity in [Parity::Cos, Parity::Sin] {
                        if n == 0 && parity == Parity::Sin { continue; }
                        let c = next() + kseed * 0.0;
                        if c.abs() < 0.2 { continue; }
                        f.add_mode(n, parity, RadialProfile::sample(
                            g, DecayClass::GaussianWeighted,
                            |r| c * base::hermite_radial(n, 0, r))).unwrap();
                    }
                }
                f
            };
            let f = mk(0.0);
            let h = mk(1.0);
            if !f.is_zero() && !h.is_zero() {
                let fg = poisson_bracket(&f, &h).unwrap();
                let gf = poisson_bracket(&h, &f).unwrap();
                let mut sum = fg.clone();
                sum.add_scaled(&gf, 1.0).unwrap();
                let scale = fg.max_abs().max(1e-300);
                proptest::prop_assert!(sum.max_abs() / scale < 1e-10);
            }
        }
    }

    #[test]
    fn both_polynomial_rejected() {
        let g = grid();
        assert!(poisson_bracket(&xi1_field(g), &xi1_field(g)).is_err());
    }

    #[test]
    fn cyclic_inner_product_identity() {
        // ⟨{f,g}, h⟩ = ⟨f, {g,h}⟩ in plain L² for decaying triples.
        let g = grid();
        let f = PolarField::from_mode(
            2,
            Parity::Cos,
            RadialProfile::sample(g, DecayClass::GaussianWeighted, |r| {
                base::hermite_radial(2, 1, r)
            }),
        )
        .unwrap();
        let gg = PolarField::from_mode(
            1,
            Parity::Sin,
            RadialProfile::sample(g, DecayClass::GaussianWeighted, |r| {
                base::hermite_radial(1, 0, r)
            }),
        )
        .unwrap();
        let h = PolarField::from_mode(
            1,
            Parity::Cos,
            RadialProfile::sample(g, DecayClass::GaussianWeighted, |r| {
                base::hermite_radial(1, 1, r)
            }),
        )
        .unwrap();
        let lhs = poisson_bracket(&f, &gg).unwrap().l2_inner(&h).unwrap();
        let rhs = f.l2_inner(&poisson_bracket(&gg, &h).unwrap()).unwrap();
        assert!((lhs - rhs).abs() < 2e-9 * lhs.abs().max(1e-6), "{lhs} vs {rhs}");
    }
}
