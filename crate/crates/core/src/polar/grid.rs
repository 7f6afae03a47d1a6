use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A uniform radial grid on [0, r_max].
///
/// Node i sits at `i * spacing()`, with node 0 exactly at the origin. All
/// profiles, operators and quadratures in the crate live on such grids;
/// mixing values from different grids is rejected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    r_max: f64,
    n_points: usize,
}

impl GridSpec {
    /// Default truncation radius. The profiles handled here all carry a
    /// Gaussian envelope, so values beyond r = 25 sit below double
    /// precision resolution (e^{-156} at the boundary).
    pub const DEFAULT_R_MAX: f64 = 25.0;
    /// Default node count; 4095 intervals split evenly into five-interval
    /// quadrature panels.
    pub const DEFAULT_N: usize = 4096;

    pub fn new(r_max: f64, n_points: usize) -> Result<Self> {
        if !(r_max > 0.0) || !r_max.is_finite() {
            return Err(Error::InvalidGrid(format!("r_max = {r_max} must be positive")));
        }
        if n_points < 16 {
            return Err(Error::InvalidGrid(format!(
                "n_points = {n_points} must be at least 16"
            )));
        }
        Ok(GridSpec { r_max, n_points })
    }

    pub fn standard() -> Self {
        GridSpec {
            r_max: Self::DEFAULT_R_MAX,
            n_points: Self::DEFAULT_N,
        }
    }

    #[inline]
    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n_points
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.r_max / (self.n_points - 1) as f64
    }

    #[inline]
    pub fn r(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    /// All node radii, strictly increasing from 0.
    pub fn radii(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.r(i)).collect()
    }

    /// Sample a scalar function at every node.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..self.n_points).map(|i| f(self.r(i))).collect()
    }

    pub fn same_as(&self, other: &GridSpec) -> bool {
        self.n_points == other.n_points && self.r_max.to_bits() == other.r_max.to_bits()
    }

    pub fn check_same(&self, other: &GridSpec, ctx: &str) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{ctx}: ({}, {}) vs ({}, {})",
                self.r_max, self.n_points, other.r_max, other.n_points
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_start_at_zero_and_increase() {
        let g = GridSpec::new(10.0, 101).unwrap();
        let r = g.radii();
        assert_eq!(r[0], 0.0);
        assert!((r[100] - 10.0).abs() < 1e-14);
        assert!(r.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(GridSpec::new(-1.0, 100).is_err());
        assert!(GridSpec::new(1.0, 8).is_err());
    }
}
