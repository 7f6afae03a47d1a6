//! The linear operators of the rescaled dynamics.
//!
//! Three operators drive the whole construction:
//!
//! * the rescaled **diffusion** operator Δ + ξ·∇/2 + 1 ([`diffusion`]),
//!   self-adjoint in the Gaussian-weighted space with spectrum {−n/2};
//! * the linearized **advection** operator at the Gaussian vortex
//!   ([`advection`]), skew-adjoint, inverted mode by mode through a radial
//!   two-point problem;
//! * the **mirror** translation/reflection of the partner vortex's stream
//!   function, used inside the series algebra only through its polynomial
//!   expansion ([`mirror`]).
//!
//! Supporting cast: per-mode stream recovery ([`biot_savart`]) and the
//! polar Poisson bracket ([`bracket`]).

pub mod advection;
mod banded;
pub mod biot_savart;
pub mod bracket;
pub mod diffusion;
pub mod mirror;
pub mod stencil;

pub use advection::{invert_mode, ModeInversion};
pub use bracket::poisson_bracket;
pub use mirror::MirrorExpansion;
