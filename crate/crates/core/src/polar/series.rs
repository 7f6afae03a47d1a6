use std::collections::BTreeMap;

use super::{GridSpec, PolarField};
use crate::Result;

/// A truncated double power series in the two small parameters (ε, δ)
/// with [`PolarField`] coefficients.
///
/// Orders beyond the declared caps are dropped on insertion and counted,
/// so truncation is consistent across arithmetic. Coefficient storage is
/// ordered, which keeps every fold over the series deterministic.
#[derive(Debug, Clone)]
pub struct EpsDeltaSeries {
    grid: GridSpec,
    order_eps: usize,
    order_delta: usize,
    coeffs: BTreeMap<(usize, usize), PolarField>,
    truncated: usize,
}

impl EpsDeltaSeries {
    pub fn new(grid: GridSpec, order_eps: usize, order_delta: usize) -> Self {
        assert!(order_delta <= 2, "the δ-algebra is truncated at degree 2");
        EpsDeltaSeries {
            grid,
            order_eps,
            order_delta,
            coeffs: BTreeMap::new(),
            truncated: 0,
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn order_eps(&self) -> usize {
        self.order_eps
    }

    pub fn order_delta(&self) -> usize {
        self.order_delta
    }

    /// How many coefficient insertions fell beyond the declared orders.
    pub fn truncated_count(&self) -> usize {
        self.truncated
    }

    pub fn coefficient(&self, k_eps: usize, k_delta: usize) -> Option<&PolarField> {
        self.coeffs.get(&(k_eps, k_delta))
    }

    /// Coefficient as an owned field, zero when absent.
    pub fn coefficient_or_zero(&self, k_eps: usize, k_delta: usize) -> PolarField {
        self.coeffs
            .get(&(k_eps, k_delta))
            .cloned()
            .unwrap_or_else(|| PolarField::zero(self.grid))
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), &PolarField)> {
        self.coeffs.iter().map(|(&k, v)| (k, v))
    }

    /// Add `c · field` into the (k_eps, k_delta) coefficient, dropping and
    /// counting anything beyond the retained orders.
    pub fn add_term(
        &mut self,
        k_eps: usize,
        k_delta: usize,
        field: &PolarField,
        c: f64,
    ) -> Result<()> {
        if k_eps > self.order_eps || k_delta > self.order_delta {
            self.truncated += 1;
            return Ok(());
        }
        if field.is_zero() || c == 0.0 {
            return Ok(());
        }
        self.grid.check_same(&field.grid(), "EpsDeltaSeries::add_term")?;
        match self.coeffs.get_mut(&(k_eps, k_delta)) {
            Some(existing) => existing.add_scaled(field, c)?,
            None => {
                self.coeffs.insert((k_eps, k_delta), field.scale(c));
            }
        }
        Ok(())
    }

    pub fn add_series(&mut self, other: &EpsDeltaSeries, c: f64) -> Result<()> {
        for (&(ke, kd), field) in &other.coeffs {
            self.add_term(ke, kd, field, c)?;
        }
        Ok(())
    }

    /// Multiply by ε^je · δ^jd (an index shift with truncation).
    pub fn shifted(&self, je: usize, jd: usize) -> EpsDeltaSeries {
        let mut out = EpsDeltaSeries::new(self.grid, self.order_eps, self.order_delta);
        out.truncated = self.truncated;
        for (&(ke, kd), field) in &self.coeffs {
            out.add_term(ke + je, kd + jd, field, 1.0)
                .expect("grids match by construction");
        }
        out
    }

    /// Combine two series coefficient-by-coefficient through a bilinear
    /// field operation (a product, a bracket, ...), truncating output
    /// orders to this series' caps.
    pub fn bilinear(
        a: &EpsDeltaSeries,
        b: &EpsDeltaSeries,
        order_eps: usize,
        order_delta: usize,
        mut op: impl FnMut(&PolarField, &PolarField) -> Result<PolarField>,
    ) -> Result<EpsDeltaSeries> {
        let mut out = EpsDeltaSeries::new(a.grid, order_eps, order_delta);
        for (&(ae, ad), fa) in &a.coeffs {
            for (&(be, bd), fb) in &b.coeffs {
                if ae + be > order_eps || ad + bd > order_delta {
                    out.truncated += 1;
                    continue;
                }
                let r = op(fa, fb)?;
                out.add_term(ae + be, ad + bd, &r, 1.0)?;
            }
        }
        Ok(out)
    }

    /// Evaluate the series at concrete (ε, δ).
    pub fn evaluate(&self, eps: f64, delta: f64) -> PolarField {
        let mut out = PolarField::zero(self.grid);
        for (&(ke, kd), field) in &self.coeffs {
            let w = eps.powi(ke as i32) * delta.powi(kd as i32);
            out.add_scaled(field, w).expect("grids match");
        }
        out
    }
}
