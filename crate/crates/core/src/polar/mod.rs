//! Radial grids, angular Fourier modes, quadrature, moments, and weighted
//! norms.
//!
//! Every planar field in this crate is carried as a finite sum
//! `Σ aₙ(r)cos(nθ) + bₙ(r)sin(nθ)` of angular modes with sampled radial
//! parts ([`PolarField`]). The decomposition is orthogonal, so weighted
//! L² norms and first moments reduce to one-dimensional radial
//! quadratures. Truncated double power series in the two small parameters
//! (ε, δ) with such fields as coefficients are handled by
//! [`EpsDeltaSeries`].

pub(crate) mod field;
mod grid;
pub(crate) mod profile;
mod quad;
mod series;

pub use field::{field_product, Parity, PolarField};
pub use grid::GridSpec;
pub use profile::{DecayClass, RadialProfile};
pub use quad::{cumulative_integral, integrate_values};
pub use series::EpsDeltaSeries;
