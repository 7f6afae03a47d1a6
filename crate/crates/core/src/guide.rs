//! The narrative guide, compiled from `book/src/` so its code snippets
//! run as doc-tests and stay in sync with the library.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/polar-fields.md")]
pub mod polar_fields {}

#[doc = include_str!("../../../book/src/base-profiles.md")]
pub mod base_profiles {}

#[doc = include_str!("../../../book/src/operators.md")]
pub mod operators_tour {}

#[doc = include_str!("../../../book/src/expansion.md")]
pub mod expansion_tour {}

#[doc = include_str!("../../../book/src/speed-law.md")]
pub mod speed_law {}

#[doc = include_str!("../../../book/src/fields.md")]
pub mod fields_tour {}

#[doc = include_str!("../../../book/src/energy.md")]
pub mod energy_tour {}

#[doc = include_str!("../../../book/src/spectral-validation.md")]
pub mod spectral_validation {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli_tour {}
