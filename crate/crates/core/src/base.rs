//! Closed-form base objects: the Gaussian vortex, its stream function and
//! velocity, the auxiliary radial functions v₀, g, h, the weight A, the
//! vorticity–stream relation F₀ of the unperturbed vortex, and the
//! harmonic polynomials rⁿcos nθ / rⁿsin nθ.
//!
//! Removable singularities at r = 0 are handled by series branches below
//! r = 10⁻³; both branches agree to ~10⁻¹³ at the seam (tested).

use crate::{Error, Result};

/// Euler–Mascheroni constant.
pub const GAMMA_E: f64 = 0.577_215_664_901_532_9;

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;
const EIGHT_PI: f64 = 8.0 * std::f64::consts::PI;
const SEAM: f64 = 1e-3;

/// The normalized Gaussian vortex profile, (1/4π) e^{−r²/4}; unit mass.
#[inline]
pub fn gaussian(r: f64) -> f64 {
    (-r * r / 4.0).exp() / FOUR_PI
}

/// E₁(x) for x > 0, complementary exponential integral.
///
/// Power series up to x = 1, backward recurrence beyond; ~1e−15 relative.
pub fn e1(x: f64) -> f64 {
    assert!(x > 0.0, "e1 requires x > 0");
    if x <= 1.0 {
        let mut acc = 1.0;
        let mut term = 1.0;
        for k in 1..=25 {
            let d = (k + 1) as f64;
            term = -term * k as f64 * x / (d * d);
            acc += term;
            if term.abs() <= acc.abs() * 1e-16 {
                break;
            }
        }
        -GAMMA_E - x.ln() + x * acc
    } else {
        let m = (80.0 / x) as usize + 20;
        let mut t0 = 0.0;
        for k in (1..=m).rev() {
            t0 = k as f64 / (k as f64 / (x + t0) + 1.0);
        }
        (-x).exp() / (x + t0)
    }
}

/// The entire exponential integral Ein(s) = ∫₀^s (1−e^{−τ})/τ dτ, s ≥ 0.
///
/// Power series below s = 8, `ln s + γ_E + E₁(s)` beyond; the switch point
/// keeps the alternating series' cancellation below two digits.
pub fn ein(s: f64) -> f64 {
    assert!(s >= 0.0, "ein requires s >= 0");
    if s == 0.0 {
        return 0.0;
    }
    if s < 8.0 {
        let mut term = 1.0f64; // s^k / k! carried incrementally
        let mut acc = 0.0f64;
        for k in 1..=60 {
            term *= s / k as f64;
            let contrib = if k % 2 == 1 { term / k as f64 } else { -term / k as f64 };
            acc += contrib;
            if term / k as f64 <= acc.abs() * 1e-17 && k > 8 {
                break;
            }
        }
        acc
    } else if s > 700.0 {
        // E₁ underflows; its contribution is below 1e-300.
        s.ln() + GAMMA_E
    } else {
        s.ln() + GAMMA_E + e1(s)
    }
}

/// Stream function of the Gaussian vortex: (1/4π)Ein(r²/4) − γ_E/(4π).
#[inline]
pub fn stream0(r: f64) -> f64 {
    (ein(r * r / 4.0) - GAMMA_E) / FOUR_PI
}

/// Angular velocity factor v₀(r) = (1 − e^{−r²/4})/(2πr²); v₀(0) = 1/8π.
pub fn v0(r: f64) -> f64 {
    let x = r * r / 4.0;
    if r < SEAM {
        (1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0) / EIGHT_PI
    } else {
        -(-x).exp_m1() / (2.0 * std::f64::consts::PI * r * r)
    }
}

/// Azimuthal speed of the Gaussian vortex, |U|(r) = r·v₀(r).
#[inline]
pub fn speed0(r: f64) -> f64 {
    r * v0(r)
}

/// g(r) = (1/8π) e^{−r²/4}; the radial derivative of the vortex profile is
/// −r g(r).
#[inline]
pub fn g_profile(r: f64) -> f64 {
    (-r * r / 4.0).exp() / EIGHT_PI
}

/// h(r) = g/v₀ = (r²/4)/(e^{r²/4} − 1); h(0) = 1, Gaussian decay.
pub fn h_profile(r: f64) -> f64 {
    let x = r * r / 4.0;
    if r < SEAM {
        1.0 - x / 2.0 + x * x / 12.0 - x.powi(4) / 720.0
    } else if x > 700.0 {
        0.0
    } else {
        x / x.exp_m1()
    }
}

/// A(r) = 4(e^{r²/4} − 1)/r² = 1/h(r); A(0) = 1. The zero-core limit of
/// the energy weight.
pub fn a_weight(r: f64) -> f64 {
    let x = r * r / 4.0;
    if r < SEAM {
        1.0 + x / 2.0 + x * x / 6.0 + x.powi(3) / 24.0
    } else {
        x.exp_m1() / x
    }
}

/// The monotone relation F₀ between the vortex profile and (minus) its
/// stream function: F₀(s) on (0, 1/4π], with F₀(gaussian(r)) = −stream0(r).
pub fn f0(s: f64) -> Result<f64> {
    let cap = 1.0 / FOUR_PI;
    if !(s > 0.0) || s > cap * (1.0 + 1e-12) {
        return Err(Error::Domain(format!("f0 defined on (0, 1/4π]; got {s}")));
    }
    let l = (cap / s).ln().max(0.0);
    Ok((GAMMA_E - ein(l)) / FOUR_PI)
}

/// F₀'(s) = (1 − e^{−L})/(4πsL) with L = log(1/(4πs)); equals A along the
/// vortex profile: F₀'(gaussian(r)) = a_weight(r).
pub fn f0_prime(s: f64) -> Result<f64> {
    let cap = 1.0 / FOUR_PI;
    if !(s > 0.0) || s > cap * (1.0 + 1e-12) {
        return Err(Error::Domain(format!("f0_prime defined on (0, 1/4π]; got {s}")));
    }
    let l = (cap / s).ln().max(0.0);
    let factor = if l < 1e-8 {
        1.0 - l / 2.0 + l * l / 6.0
    } else {
        -(-l).exp_m1() / l
    };
    Ok(factor / (FOUR_PI * s))
}

/// F₀''(s) = (1 − L − e^{−L})/(4πs²L²); limit −2π·(4πs)⁻²·... finite at
/// the endpoint s = 1/4π.
pub fn f0_double_prime(s: f64) -> Result<f64> {
    let cap = 1.0 / FOUR_PI;
    if !(s > 0.0) || s > cap * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "f0_double_prime defined on (0, 1/4π]; got {s}"
        )));
    }
    let l = (cap / s).ln().max(0.0);
    let factor = if l < 1e-4 {
        -0.5 + l / 6.0 - l * l / 24.0
    } else {
        (1.0 - l - (-l).exp()) / (l * l)
    };
    Ok(factor / (FOUR_PI * s * s))
}

/// Invert the vortex profile: the radius r with gaussian(r) = s.
pub fn gaussian_inverse(s: f64) -> Result<f64> {
    let cap = 1.0 / FOUR_PI;
    if !(s > 0.0) || s > cap * (1.0 + 1e-12) {
        return Err(Error::Domain(format!("gaussian_inverse needs s in (0, 1/4π]; got {s}")));
    }
    Ok(2.0 * (cap / s).ln().max(0.0).sqrt())
}

/// Harmonic polynomial kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HarmonicKind {
    Cos,
    Sin,
}

/// The degree-n harmonic polynomials Re(x₁+ix₂)ⁿ and Im(x₁+ix₂)ⁿ, i.e.
/// rⁿcos nθ and rⁿsin nθ, by iterated complex multiplication.
pub fn q_poly(n: u32, kind: HarmonicKind, x: (f64, f64)) -> f64 {
    let (mut re, mut im) = (1.0f64, 0.0f64);
    for _ in 0..n {
        let nre = re * x.0 - im * x.1;
        let nim = re * x.1 + im * x.0;
        re = nre;
        im = nim;
    }
    match kind {
        HarmonicKind::Cos => re,
        HarmonicKind::Sin => im,
    }
}

/// Residuals of the three generating-series identities of the harmonic
/// polynomials at a point |x| < 1:
///
/// * Σ (−1)ⁿ Qₙᶜ(x)        = (1+x₁)/(1+2x₁+|x|²)
/// * Σ (−1)ⁿ⁻¹ Qₙˢ(x)      = x₂/(1+2x₁+|x|²)
/// * Σ (−1)ⁿ⁻¹ Qₙᶜ(x)/n    = ½ log(1+2x₁+|x|²)
#[derive(Debug, Clone, Copy)]
pub struct HarmonicSeriesResiduals {
    pub cos_identity: f64,
    pub sin_identity: f64,
    pub log_identity: f64,
}

pub fn q_series_check(x: (f64, f64), n_terms: u32) -> Result<HarmonicSeriesResiduals> {
    let norm2 = x.0 * x.0 + x.1 * x.1;
    if norm2 >= 1.0 {
        return Err(Error::Domain(format!(
            "harmonic series diverge for |x| >= 1 (|x| = {})",
            norm2.sqrt()
        )));
    }
    let denom = 1.0 + 2.0 * x.0 + norm2;
    let mut cos_sum = 0.0;
    let mut sin_sum = 0.0;
    let mut log_sum = 0.0;
    let (mut re, mut im) = (1.0f64, 0.0f64); // (x₁+ix₂)^n, starting at n = 0
    for n in 0..=n_terms {
        if n > 0 {
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            sin_sum += sign * im;
            log_sum += sign * re / n as f64;
        }
        let sign_c = if n % 2 == 0 { 1.0 } else { -1.0 };
        cos_sum += sign_c * re;
        let nre = re * x.0 - im * x.1;
        let nim = re * x.1 + im * x.0;
        re = nre;
        im = nim;
    }
    Ok(HarmonicSeriesResiduals {
        cos_identity: (cos_sum - (1.0 + x.0) / denom).abs(),
        sin_identity: (sin_sum - x.1 / denom).abs(),
        log_identity: (log_sum - 0.5 * denom.ln()).abs(),
    })
}

/// Generalized Laguerre polynomial L_k^{(α)}(x) by the three-term
/// recurrence.
pub fn laguerre(k: u32, alpha: f64, x: f64) -> f64 {
    match k {
        0 => 1.0,
        1 => 1.0 + alpha - x,
        _ => {
            let mut lm1 = 1.0;
            let mut l = 1.0 + alpha - x;
            for j in 1..k {
                let jf = j as f64;
                let next = ((2.0 * jf + 1.0 + alpha - x) * l - (jf + alpha) * lm1) / (jf + 1.0);
                lm1 = l;
                l = next;
            }
            l
        }
    }
}

/// Radial part of the degree-(n + 2k) eigenfunction of the rescaled
/// diffusion operator in angular mode n: rⁿ L_k^{(n)}(r²/4) e^{−r²/4},
/// eigenvalue −(n + 2k)/2.
pub fn hermite_radial(n: u32, k: u32, r: f64) -> f64 {
    let x = r * r / 4.0;
    r.powi(n as i32) * laguerre(k, n as f64, x) * (-x).exp()
}

/// Named pointwise access to the base profiles, mirroring the module's
/// free functions; `f0`-family names take the argument as s, the rest as r.
pub fn eval_base(name: &str, arg: f64) -> Result<f64> {
    match name {
        "gaussian" => Ok(gaussian(arg)),
        "stream" => Ok(stream0(arg)),
        "speed" => Ok(speed0(arg)),
        "v0" => Ok(v0(arg)),
        "g" => Ok(g_profile(arg)),
        "h" => Ok(h_profile(arg)),
        "a" => Ok(a_weight(arg)),
        "f0" => f0(arg),
        "f0_prime" => f0_prime(arg),
        _ => Err(Error::Domain(format!("unknown base profile '{name}'"))),
    }
}
