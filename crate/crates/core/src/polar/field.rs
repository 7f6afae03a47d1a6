use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{DecayClass, GridSpec, RadialProfile};
use crate::util::kahan_sum;
use crate::{Error, Result};

/// Angular parity of a mode: cos(nθ) or sin(nθ).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Parity {
    Cos,
    Sin,
}

impl Parity {
    pub fn flip(self) -> Parity {
        match self {
            Parity::Cos => Parity::Sin,
            Parity::Sin => Parity::Cos,
        }
    }
}

pub(crate) type ModeKey = (u32, Parity);

/// A planar field as a finite sum of angular Fourier modes
/// `a(r)cos(nθ) + b(r)sin(nθ)`. Absent modes are identically zero; a sin
/// mode at n = 0 is rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(into = "PolarFieldRepr", try_from = "PolarFieldRepr")]
pub struct PolarField {
    grid: GridSpec,
    modes: BTreeMap<ModeKey, RadialProfile>,
}

/// Serialization mirror: tuple map keys do not fit JSON, so modes are
/// stored as a list.
#[derive(Serialize, Deserialize)]
pub struct PolarFieldRepr {
    grid: GridSpec,
    modes: Vec<ModeRepr>,
}

#[derive(Serialize, Deserialize)]
struct ModeRepr {
    n: u32,
    parity: Parity,
    profile: RadialProfile,
}

impl From<PolarField> for PolarFieldRepr {
    fn from(f: PolarField) -> Self {
        PolarFieldRepr {
            grid: f.grid,
            modes: f
                .modes
                .into_iter()
                .map(|((n, parity), profile)| ModeRepr { n, parity, profile })
                .collect(),
        }
    }
}

impl TryFrom<PolarFieldRepr> for PolarField {
    type Error = crate::Error;
    fn try_from(r: PolarFieldRepr) -> Result<Self> {
        let mut f = PolarField::zero(r.grid);
        for m in r.modes {
            f.add_mode(m.n, m.parity, m.profile)?;
        }
        Ok(f)
    }
}

impl PolarField {
    pub fn zero(grid: GridSpec) -> Self {
        PolarField {
            grid,
            modes: BTreeMap::new(),
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    /// Insert (adding to any existing content) a mode.
    pub fn add_mode(&mut self, n: u32, parity: Parity, profile: RadialProfile) -> Result<()> {
        if n == 0 && parity == Parity::Sin {
            return Err(Error::Domain("sin mode at n = 0 is identically zero".into()));
        }
        self.grid.check_same(&profile.grid, "PolarField::add_mode")?;
        match self.modes.get_mut(&(n, parity)) {
            Some(existing) => existing.add_scaled(&profile, 1.0)?,
            None => {
                self.modes.insert((n, parity), profile);
            }
        }
        Ok(())
    }

    pub fn from_mode(n: u32, parity: Parity, profile: RadialProfile) -> Result<Self> {
        let mut f = PolarField::zero(profile.grid);
        f.add_mode(n, parity, profile)?;
        Ok(f)
    }

    pub fn mode(&self, n: u32, parity: Parity) -> Option<&RadialProfile> {
        self.modes.get(&(n, parity))
    }

    pub fn modes(&self) -> impl Iterator<Item = (u32, Parity, &RadialProfile)> {
        self.modes.iter().map(|(&(n, p), prof)| (n, p, prof))
    }

    pub fn n_max(&self) -> u32 {
        self.modes.keys().map(|&(n, _)| n).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.modes.is_empty()
    }

    /// Worst decay class over all modes (Gaussian if empty).
    pub fn decay(&self) -> DecayClass {
        self.modes
            .values()
            .map(|p| p.decay)
            .fold(DecayClass::GaussianWeighted, DecayClass::sum)
    }

    pub fn max_abs(&self) -> f64 {
        self.modes.values().map(|p| p.max_abs()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: f64) -> PolarField {
        let mut out = self.clone();
        for p in out.modes.values_mut() {
            p.scale_in_place(c);
        }
        out
    }

    pub fn add_scaled(&mut self, other: &PolarField, c: f64) -> Result<()> {
        self.grid.check_same(&other.grid, "PolarField::add_scaled")?;
        if c == 0.0 {
            return Ok(());
        }
        for (&(n, parity), prof) in &other.modes {
            match self.modes.get_mut(&(n, parity)) {
                Some(existing) => existing.add_scaled(prof, c)?,
                None => {
                    let mut p = prof.clone();
                    p.scale_in_place(c);
                    self.modes.insert((n, parity), p);
                }
            }
        }
        Ok(())
    }

    pub fn sum(&self, other: &PolarField) -> Result<PolarField> {
        let mut out = self.clone();
        out.add_scaled(other, 1.0)?;
        Ok(out)
    }

    /// Drop modes whose radial part is identically negligible compared to
    /// the field scale.
    pub fn prune(&mut self, rel_tol: f64) {
        let scale = self.max_abs();
        if scale == 0.0 {
            self.modes.clear();
            return;
        }
        self.modes.retain(|_, p| p.max_abs() > rel_tol * scale);
    }

    /// The radial (n = 0) component as a field.
    pub fn radial_part(&self) -> PolarField {
        let mut out = PolarField::zero(self.grid);
        if let Some(p) = self.mode(0, Parity::Cos) {
            out.modes.insert((0, Parity::Cos), p.clone());
        }
        out
    }

    /// Everything except the radial component.
    pub fn nonradial_part(&self) -> PolarField {
        let mut out = self.clone();
        out.modes.remove(&(0, Parity::Cos));
        out
    }

    /// Keep only modes with the given angular reflection parity in ξ₂
    /// (θ ↦ −θ): even fields have only cos modes, odd fields only sin.
    pub fn even_in_xi2_part(&self) -> PolarField {
        let mut out = self.clone();
        out.modes.retain(|&(_, p), _| p == Parity::Cos);
        out
    }

    pub fn odd_in_xi2_part(&self) -> PolarField {
        let mut out = self.clone();
        out.modes.retain(|&(_, p), _| p == Parity::Sin);
        out
    }

    /// Mean and first moments (M, m₁, m₂) of the planar field.
    ///
    /// Only the n = 0 mode carries mass and only the n = 1 modes carry
    /// first moments; everything else integrates to zero by angular
    /// orthogonality.
    pub fn moments(&self) -> (f64, f64, f64) {
        let two_pi = 2.0 * std::f64::consts::PI;
        let pi = std::f64::consts::PI;
        let mass = self
            .mode(0, Parity::Cos)
            .map(|p| two_pi * p.quad_radial(1).unwrap_or(f64::NAN))
            .unwrap_or(0.0);
        let m1 = self
            .mode(1, Parity::Cos)
            .map(|p| pi * p.quad_radial(2).unwrap_or(f64::NAN))
            .unwrap_or(0.0);
        let m2 = self
            .mode(1, Parity::Sin)
            .map(|p| pi * p.quad_radial(2).unwrap_or(f64::NAN))
            .unwrap_or(0.0);
        (mass, m1, m2)
    }

    /// Gaussian-weighted L² norm, (∫ |f|² e^{r²/4} dξ)^{1/2}, evaluated
    /// mode by mode through the angular Parseval identity.
    pub fn weighted_norm(&self) -> Result<f64> {
        Ok(self.weighted_norm_sq()?.sqrt())
    }

    pub fn weighted_norm_sq(&self) -> Result<f64> {
        let pi = std::f64::consts::PI;
        let mut total = Vec::with_capacity(self.modes.len());
        for (&(n, _), prof) in &self.modes {
            if !prof.decay.decays() {
                return Err(Error::DecayClass {
                    op: "weighted_norm",
                    class: prof.decay,
                    msg: "the e^{r²/4}-weighted integral diverges".into(),
                });
            }
            let angular = if n == 0 { 2.0 * pi } else { pi };
            let h = prof.grid.spacing();
            let vals: Vec<f64> = prof
                .values
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let r = prof.grid.r(i);
                    v * v * (r * r / 4.0).exp() * r
                })
                .collect();
            total.push(angular * super::integrate_values(&vals, h));
        }
        Ok(kahan_sum(total))
    }

    /// Gaussian-weighted inner product ⟨f, g⟩ = ∫ f g e^{r²/4} dξ.
    pub fn weighted_inner(&self, other: &PolarField) -> Result<f64> {
        self.grid.check_same(&other.grid, "weighted_inner")?;
        let pi = std::f64::consts::PI;
        let mut total = Vec::new();
        for (&(n, parity), a) in &self.modes {
            if let Some(b) = other.modes.get(&(n, parity)) {
                if !a.decay.decays() || !b.decay.decays() {
                    return Err(Error::DecayClass {
                        op: "weighted_inner",
                        class: a.decay.product(b.decay),
                        msg: "the e^{r²/4}-weighted integral diverges".into(),
                    });
                }
                let angular = if n == 0 { 2.0 * pi } else { pi };
                let h = a.grid.spacing();
                let vals: Vec<f64> = a
                    .values
                    .iter()
                    .zip(&b.values)
                    .enumerate()
                    .map(|(i, (x, y))| {
                        let r = a.grid.r(i);
                        x * y * (r * r / 4.0).exp() * r
                    })
                    .collect();
                total.push(angular * super::integrate_values(&vals, h));
            }
        }
        Ok(kahan_sum(total))
    }

    /// Plain L² inner product ∫ f g dξ via per-mode Parseval.
    pub fn l2_inner(&self, other: &PolarField) -> Result<f64> {
        self.grid.check_same(&other.grid, "l2_inner")?;
        let pi = std::f64::consts::PI;
        let mut total = Vec::new();
        for (&(n, parity), a) in &self.modes {
            if let Some(b) = other.modes.get(&(n, parity)) {
                let angular = if n == 0 { 2.0 * pi } else { pi };
                let h = a.grid.spacing();
                let vals: Vec<f64> = a
                    .values
                    .iter()
                    .zip(&b.values)
                    .enumerate()
                    .map(|(i, (x, y))| x * y * a.grid.r(i))
                    .collect();
                total.push(angular * super::integrate_values(&vals, h));
            }
        }
        Ok(kahan_sum(total))
    }

    /// Pointwise value at polar coordinates (r on the grid is not
    /// required; plain linear use is for tests — precise sampling lives in
    /// `fields2d`).
    pub fn value_at_node(&self, i: usize, theta: f64) -> f64 {
        let mut acc = 0.0;
        for (&(n, parity), prof) in &self.modes {
            let ang = match parity {
                Parity::Cos => (n as f64 * theta).cos(),
                Parity::Sin => (n as f64 * theta).sin(),
            };
            acc += prof.values[i] * ang;
        }
        acc
    }
}

/// Terms produced when two angular factors multiply: X(mθ)·Y(nθ) expands
/// into modes |m−n| and m+n with the listed parities and coefficients.
pub(crate) fn angular_product(m: u32, pm: Parity, n: u32, pn: Parity) -> Vec<(u32, Parity, f64)> {
    use Parity::*;
    let sum = m + n;
    let diff = m.abs_diff(n);
    // sign of (m − n) for the sin(m−n) terms
    let sgn = if m >= n { 1.0 } else { -1.0 };
    let mut out: Vec<(u32, Parity, f64)> = Vec::with_capacity(2);
    match (pm, pn) {
        (Cos, Cos) => {
            out.push((diff, Cos, 0.5));
            out.push((sum, Cos, 0.5));
        }
        (Sin, Sin) => {
            // sin·sin = ½cos((m−n)θ) − ½cos((m+n)θ); cos is even in its
            // argument so no sign correction is needed for m < n.
            out.push((diff, Cos, 0.5));
            out.push((sum, Cos, -0.5));
        }
        (Sin, Cos) => {
            out.push((sum, Sin, 0.5));
            if diff != 0 {
                out.push((diff, Sin, 0.5 * sgn));
            }
        }
        (Cos, Sin) => {
            out.push((sum, Sin, 0.5));
            if diff != 0 {
                out.push((diff, Sin, -0.5 * sgn));
            }
        }
    }
    // Collapse duplicate keys (m = n cases) and drop zero-amplitude sin(0).
    let mut merged: BTreeMap<(u32, Parity), f64> = BTreeMap::new();
    for (k, p, c) in out {
        if p == Sin && k == 0 {
            continue;
        }
        *merged.entry((k, p)).or_insert(0.0) += c;
    }
    merged
        .into_iter()
        .filter(|&(_, c)| c != 0.0)
        .map(|((k, p), c)| (k, p, c))
        .collect()
}

/// Pointwise product of two polar fields (exact mode coupling).
pub fn field_product(f: &PolarField, g: &PolarField) -> Result<PolarField> {
    f.grid().check_same(&g.grid(), "field_product")?;
    let grid = f.grid();
    let mut out = PolarField::zero(grid);
    for (m, pm, a) in f.modes() {
        for (n, pn, c) in g.modes() {
            let decay = a.decay.product(c.decay);
            let vals: Vec<f64> = a.values.iter().zip(&c.values).map(|(x, y)| x * y).collect();
            for (k, pk, coeff) in angular_product(m, pm, n, pn) {
                let mut prof = RadialProfile::new(grid, vals.clone(), decay)?;
                prof.scale_in_place(coeff);
                out.add_mode(k, pk, prof)?;
            }
        }
    }
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
        let p = RadialProfile::sample(g, DecayClass::GaussianWeighted, base::gaussian);
        PolarField::from_mode(0, Parity::Cos, p).unwrap()
    }

    #[test]
    fn no_sin_mode_at_zero() {
        let g = grid();
        let p = RadialProfile::zeros(g);
        assert!(PolarField::from_mode(0, Parity::Sin, p).is_err());
    }

    #[test]
    fn gaussian_moments() {
        let f = gaussian_field(grid());
        let (mass, m1, m2) = f.moments();
        assert!((mass - 1.0).abs() < 1e-12);
        assert_eq!(m1, 0.0);
        assert_eq!(m2, 0.0);
    }

    #[test]
    fn d2_gaussian_moments() {
        // ∂₂G = -(r/2)G sinθ: mass 0, m₁ 0, m₂ = −1.
        let g = grid();
        let p = RadialProfile::sample(g, DecayClass::GaussianWeighted, |r| {
            -0.5 * r * base::gaussian(r)
        });
        let f = PolarField::from_mode(1, Parity::Sin, p).unwrap();
        let (mass, m1, m2) = f.moments();
        assert_eq!(mass, 0.0);
        assert_eq!(m1, 0.0);
        assert!((m2 + 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_n2_moments_vanish() {
        let g = grid();
        let p = RadialProfile::sample(g, DecayClass::GaussianWeighted, |r| {
            r * r * base::gaussian(r)
        });
        let f = PolarField::from_mode(2, Parity::Cos, p).unwrap();
        assert_eq!(f.moments(), (0.0, 0.0, 0.0));
    }

    #[test]
    fn gaussian_weighted_norm() {
        // ∫ G² e^{r²/4} dξ = 1/(4π)
        let f = gaussian_field(grid());
        let expect = (4.0 * std::f64::consts::PI).powf(-0.5);
        assert!((f.weighted_norm().unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn norm_is_pythagorean_over_modes() {
        let g = grid();
        let p0 = RadialProfile::sample(g, DecayClass::GaussianWeighted, base::gaussian);
        let p2 = RadialProfile::sample(g, DecayClass::GaussianWeighted, |r| {
            r * r * base::gaussian(r)
        });
        let f0 = PolarField::from_mode(0, Parity::Cos, p0.clone()).unwrap();
        let f2 = PolarField::from_mode(2, Parity::Cos, p2.clone()).unwrap();
        let mut both = PolarField::zero(g);
        both.add_mode(0, Parity::Cos, p0).unwrap();
        both.add_mode(2, Parity::Cos, p2).unwrap();
        let lhs = both.weighted_norm_sq().unwrap();
        let rhs = f0.weighted_norm_sq().unwrap() + f2.weighted_norm_sq().unwrap();
        assert!((lhs - rhs).abs() < 1e-12 * rhs);
    }

    #[test]
    fn polynomial_norm_rejected() {
        let g = grid();
        let p = RadialProfile::sample(g, DecayClass::PolynomialGrowth, |r| r);
        let f = PolarField::from_mode(1, Parity::Cos, p).unwrap();
        assert!(f.weighted_norm().is_err());
    }

    #[test]
    fn product_of_cos_modes() {
        // cosθ·cosθ = ½ + ½cos2θ
        let g = grid();
        let one = RadialProfile::sample(g, DecayClass::GaussianWeighted, |r| (-r * r / 4.0).exp());
        let f = PolarField::from_mode(1, Parity::Cos, one.clone()).unwrap();
        let prod = field_product(&f, &f).unwrap();
        let a0 = prod.mode(0, Parity::Cos).unwrap();
        let a2 = prod.mode(2, Parity::Cos).unwrap();
        for i in [0usize, 10, 100] {
            let e = (-g.r(i) * g.r(i) / 2.0).exp();
            assert!((a0.values[i] - 0.5 * e).abs() < 1e-15);
            assert!((a2.values[i] - 0.5 * e).abs() < 1e-15);
        }
    }

    #[test]
    fn product_mixed_parity() {
        // sin2θ·cosθ = ½ sin3θ + ½ sinθ
        let g = grid();
        let one = RadialProfile::sample(g, DecayClass::GaussianWeighted, |_| 1.0);
        let f = PolarField::from_mode(2, Parity::Sin, one.clone()).unwrap();
        let h = PolarField::from_mode(1, Parity::Cos, one).unwrap();
        let prod = field_product(&f, &h).unwrap();
        assert!((prod.mode(3, Parity::Sin).unwrap().values[5] - 0.5).abs() < 1e-15);
        assert!((prod.mode(1, Parity::Sin).unwrap().values[5] - 0.5).abs() < 1e-15);
        assert!(prod.mode(1, Parity::Cos).is_none());
    }
}
