//! The assembled dipole-core expansion: vorticity and stream profiles
//! order by order, speed coefficients, and construction diagnostics.

use serde::{Deserialize, Serialize};

use crate::polar::{GridSpec, Parity, PolarField};
use crate::{Error, Result};

/// Schema version of the serialized bundle document.
pub const BUNDLE_FORMAT_VERSION: u32 = 1;

/// Per-order diagnostics recorded while the expansion is built.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct OrderDiagnostics {
    /// Order k this entry belongs to.
    pub order: usize,
    /// Max-abs of the residual-series coefficients at orders ≤ k that the
    /// construction should have annihilated (internal consistency).
    pub cancelled_floor: f64,
    /// Max-abs of the wrong-parity content removed from the driving
    /// fields (should be rounding-level).
    pub parity_defect: f64,
    /// Moment defects (mass, m1, m2) of the inviscid profile.
    pub moments_e: (f64, f64, f64),
    /// Moment defects of the viscous correction profile.
    pub moments_ns: (f64, f64, f64),
    /// n = 1 solvability defects encountered in the inversions.
    pub solvability_defects: Vec<f64>,
    /// Residual of the advection-inversion equations under direct
    /// substitution, relative to the driving field scale.
    pub inversion_residual: f64,
}

/// Profiles of the two-parameter core expansion up to order M: the
/// vorticity corrections, their stream functions, and the translation
/// speed coefficients.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExpansionBundle {
    pub(crate) grid: GridSpec,
    pub(crate) order: usize,
    /// Inviscid vorticity profiles, index k = 0..=order (k = 1 is zero).
    pub(crate) omega_e: Vec<PolarField>,
    /// Viscous-correction vorticity profiles.
    pub(crate) omega_ns: Vec<PolarField>,
    /// Stream functions of `omega_e` (index 0 carries the closed form).
    pub(crate) psi_e: Vec<PolarField>,
    /// Stream functions of `omega_ns`.
    pub(crate) psi_ns: Vec<PolarField>,
    /// Speed coefficients: zeta_e[k] multiplies ε^k; zeta_e[0] = 1.
    pub(crate) zeta_e: Vec<f64>,
    pub(crate) zeta_ns: Vec<f64>,
    pub(crate) diagnostics: Vec<OrderDiagnostics>,
}

impl ExpansionBundle {
    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    /// Expansion order M.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn omega_e(&self, k: usize) -> &PolarField {
        &self.omega_e[k]
    }

    pub fn omega_ns(&self, k: usize) -> &PolarField {
        &self.omega_ns[k]
    }

    pub fn psi_e(&self, k: usize) -> &PolarField {
        &self.psi_e[k]
    }

    pub fn psi_ns(&self, k: usize) -> &PolarField {
        &self.psi_ns[k]
    }

    /// ζ_k = ζ_k^E + δ·ζ_k^NS; defined for k ≤ order − 1.
    pub fn zeta_coefficient(&self, k: usize) -> (f64, f64) {
        (self.zeta_e[k], self.zeta_ns[k])
    }

    pub fn n_zeta(&self) -> usize {
        self.zeta_e.len()
    }

    pub fn diagnostics(&self) -> &[OrderDiagnostics] {
        &self.diagnostics
    }

    /// The full vorticity field at concrete (ε, δ), truncated at order M.
    pub fn omega_app(&self, eps: f64, delta: f64) -> PolarField {
        let mut out = PolarField::zero(self.grid);
        for k in 0..=self.order {
            let w = eps.powi(k as i32);
            out.add_scaled(&self.omega_e[k], w).expect("grids match");
            out.add_scaled(&self.omega_ns[k], w * delta).expect("grids match");
        }
        out
    }

    /// The inviscid vorticity field at concrete ε.
    pub fn omega_app_e(&self, eps: f64) -> PolarField {
        self.omega_app(eps, 0.0)
    }

    /// The stream function at concrete (ε, δ).
    pub fn psi_app(&self, eps: f64, delta: f64) -> PolarField {
        let mut out = PolarField::zero(self.grid);
        for k in 0..=self.order {
            let w = eps.powi(k as i32);
            out.add_scaled(&self.psi_e[k], w).expect("grids match");
            out.add_scaled(&self.psi_ns[k], w * delta).expect("grids match");
        }
        out
    }

    /// t·d/dt of the vorticity field at fixed profiles: each ε^k term
    /// carries a factor k/2.
    pub fn omega_app_tdt(&self, eps: f64, delta: f64) -> PolarField {
        let mut out = PolarField::zero(self.grid);
        for k in 1..=self.order {
            let w = 0.5 * k as f64 * eps.powi(k as i32);
            out.add_scaled(&self.omega_e[k], w).expect("grids match");
            out.add_scaled(&self.omega_ns[k], w * delta).expect("grids match");
        }
        out
    }

    /// Speed factor ζ(ε, δ) = 1 + Σ ε^k ζ_k, relative to the point-vortex
    /// speed.
    pub fn zeta_app(&self, eps: f64, delta: f64) -> f64 {
        let mut acc = 0.0;
        for k in (0..self.zeta_e.len()).rev() {
            acc = acc * eps + (self.zeta_e[k] + delta * self.zeta_ns[k]);
        }
        acc
    }

    /// The positive core-deformation profile of the leading correction:
    /// the (2, cos) radial part of the first inviscid profile is −w₂.
    pub fn deformation_profile(&self) -> Result<Vec<f64>> {
        if self.order < 2 {
            return Err(Error::Domain("bundle order must be at least 2".into()));
        }
        let a = self.omega_e[2]
            .mode(2, Parity::Cos)
            .ok_or_else(|| Error::Consistency("leading profile lacks its (2, cos) mode".into()))?;
        Ok(a.values.iter().map(|v| -v).collect())
    }

    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Doc<'a> {
            format_version: u32,
            order: usize,
            grid: &'a GridSpec,
            bundle: &'a ExpansionBundle,
        }
        Ok(serde_json::to_string(&Doc {
            format_version: BUNDLE_FORMAT_VERSION,
            order: self.order,
            grid: &self.grid,
            bundle: self,
        })?)
    }

    pub fn from_json(text: &str) -> Result<ExpansionBundle> {
        #[derive(Deserialize)]
        struct Doc {
            format_version: u32,
            bundle: ExpansionBundle,
        }
        let doc: Doc = serde_json::from_str(text)?;
        if doc.format_version != BUNDLE_FORMAT_VERSION {
            return Err(Error::Config(format!(
                "bundle format version {} unsupported (expected {BUNDLE_FORMAT_VERSION})",
                doc.format_version
            )));
        }
        Ok(doc.bundle)
    }
}
