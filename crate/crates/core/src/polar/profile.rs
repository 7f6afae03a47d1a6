use serde::{Deserialize, Serialize};

use super::{cumulative_integral, integrate_values, GridSpec};
use crate::{Error, Result};

/// How a radial profile behaves at large r. The tag gates which operations
/// accept a profile: weighted norms and quadratures require the Gaussian
/// envelope, while stream-function and polynomial data only support
/// pointwise algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecayClass {
    /// e^{r²/8}-integrable; Gaussian envelope.
    GaussianWeighted,
    /// At most polynomial growth.
    PolynomialGrowth,
    /// Bounded but not decaying (stream-function tails and the like).
    Bounded,
}

impl DecayClass {
    /// Class of a pointwise product.
    pub fn product(self, other: DecayClass) -> DecayClass {
        use DecayClass::*;
        match (self, other) {
            (GaussianWeighted, _) | (_, GaussianWeighted) => GaussianWeighted,
            (PolynomialGrowth, _) | (_, PolynomialGrowth) => PolynomialGrowth,
            (Bounded, Bounded) => Bounded,
        }
    }

    /// Class of a sum.
    pub fn sum(self, other: DecayClass) -> DecayClass {
        use DecayClass::*;
        match (self, other) {
            (PolynomialGrowth, _) | (_, PolynomialGrowth) => PolynomialGrowth,
            (Bounded, _) | (_, Bounded) => Bounded,
            (GaussianWeighted, GaussianWeighted) => GaussianWeighted,
        }
    }

    pub fn decays(self) -> bool {
        matches!(self, DecayClass::GaussianWeighted)
    }
}

/// A real function of r ≥ 0 sampled on a [`GridSpec`], with a decay tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub grid: GridSpec,
    pub values: Vec<f64>,
    pub decay: DecayClass,
}

impl RadialProfile {
    pub fn new(grid: GridSpec, values: Vec<f64>, decay: DecayClass) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "profile has {} values for a {}-node grid",
                values.len(),
                grid.len()
            )));
        }
        Ok(RadialProfile { grid, values, decay })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        RadialProfile {
            grid,
            values: vec![0.0; grid.len()],
            decay: DecayClass::GaussianWeighted,
        }
    }

    pub fn sample(grid: GridSpec, decay: DecayClass, f: impl Fn(f64) -> f64) -> Self {
        RadialProfile {
            grid,
            values: grid.sample(f),
            decay,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Whether a Gaussian-tagged profile really is below the tolerance at
    /// the grid boundary once the e^{r²/8} weight is applied.
    pub fn gaussian_tail_ok(&self, tol: f64) -> bool {
        let r = self.grid.r_max();
        let last = self.values[self.grid.len() - 1].abs();
        // e^{r²/8} overflows for the standard grid sizes we allow, so
        // compare logarithms.
        last == 0.0 || last.ln() + r * r / 8.0 < tol.ln()
    }

    pub fn scale_in_place(&mut self, c: f64) {
        for v in &mut self.values {
            *v *= c;
        }
    }

    pub fn add_scaled(&mut self, other: &RadialProfile, c: f64) -> Result<()> {
        self.grid.check_same(&other.grid, "RadialProfile::add_scaled")?;
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += c * b;
        }
        self.decay = self.decay.sum(other.decay);
        Ok(())
    }

    /// ∫_0^{r_max} a(r) r^power dr by composite high-order quadrature.
    ///
    /// Polynomial-growth profiles are rejected: the integral they stand in
    /// for does not converge on the half-line, so a grid value would be
    /// meaningless.
    pub fn quad_radial(&self, power: u32) -> Result<f64> {
        if self.decay == DecayClass::PolynomialGrowth {
            return Err(Error::DecayClass {
                op: "quad_radial",
                class: self.decay,
                msg: format!("integrand r^{power}·a(r) grows at infinity"),
            });
        }
        let h = self.grid.spacing();
        let vals: Vec<f64> = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| v * self.grid.r(i).powi(power as i32))
            .collect();
        Ok(integrate_values(&vals, h))
    }

    /// Debug dump: `r,value` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,value\n");
        for (i, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{},{}\n", self.grid.r(i), v));
        }
        out
    }

    /// Cumulative integral of a(r) r^power from 0 to each node.
    pub fn cumulative_weighted(&self, power: u32) -> Vec<f64> {
        let h = self.grid.spacing();
        let vals: Vec<f64> = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| v * self.grid.r(i).powi(power as i32))
            .collect();
        cumulative_integral(&vals, h)
    }
}

/// Value at r = 0 of a(r)/r^n for a mode-n radial part, by even polynomial
/// extrapolation in r² through the first interior nodes.
pub(crate) fn divide_rn_limit(grid: &GridSpec, values: &[f64], n: u32) -> f64 {
    if n == 0 {
        return values[0];
    }
    // Lagrange through (r_i², b_i), i = 1..=4, evaluated at 0.
    let b: Vec<f64> = (1..=4)
        .map(|i| values[i] / grid.r(i).powi(n as i32))
        .collect();
    let s: Vec<f64> = (1..=4).map(|i| grid.r(i) * grid.r(i)).collect();
    let mut acc = 0.0;
    for j in 0..4 {
        let mut w = 1.0;
        for k in 0..4 {
            if k != j {
                w *= s[k] / (s[k] - s[j]);
            }
        }
        acc += w * b[j];
    }
    acc
}

/// a(r)/r^n on the whole grid for a mode-n radial part (the "even factor").
pub(crate) fn divide_rn(grid: &GridSpec, values: &[f64], n: u32) -> Vec<f64> {
    if n == 0 {
        return values.to_vec();
    }
    let mut out = Vec::with_capacity(values.len());
    out.push(divide_rn_limit(grid, values, n));
    for i in 1..values.len() {
        out.push(values[i] / grid.r(i).powi(n as i32));
    }
    out
}
