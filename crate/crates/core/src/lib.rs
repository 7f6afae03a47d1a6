//! Numerics for counter-rotating vortex pairs at high Reynolds number.
//!
//! A viscous vortex dipole — two Gaussian-core vortices of circulation ±Γ a
//! distance d apart — translates at roughly the point-vortex speed Γ/(2πd).
//! This crate constructs the core correction to that picture to arbitrary
//! order in the aspect ratio ε = √(νt)/d and first order in the inverse
//! Reynolds number δ = ν/Γ:
//!
//! * [`polar`] — radial grids, angular Fourier modes, quadrature, weighted
//!   norms, and truncated (ε, δ) power-series bookkeeping;
//! * [`base`] — the Gaussian vortex profile and the special functions tied
//!   to it;
//! * [`operators`] — the rescaled diffusion operator, the linearized
//!   advection operator with its mode-wise inversion, per-mode stream
//!   recovery, the polar Poisson bracket, and the polynomial expansion of
//!   the mirror-vortex stream function;
//! * [`expansion`] — the order-by-order construction of the dipole core
//!   profiles, the speed coefficients (including the self-propulsion
//!   constant α ≈ 22.24), remainder measurements, and the vorticity–stream
//!   functional relation;
//! * [`fields2d`] — assembly of concrete two-dimensional fields, contour
//!   extraction, and CSV/SVG export;
//! * [`energy`] — weighted norms, the quadratic energy and diffusion
//!   functionals, and measured coercivity diagnostics;
//! * [`dns`] — a pseudo-spectral vorticity solver used to validate the
//!   translation-speed law at desk scale.
//!
//! The narrative guide in `book/` walks through the same material chapter
//! by chapter; its code snippets are compiled as doc-tests via [`guide`].

pub mod base;
pub mod dns;
pub mod energy;
pub mod error;
pub mod expansion;
pub mod fields2d;
pub mod guide;
pub mod operators;
pub mod polar;
pub mod util;

pub use error::{Error, Result};
