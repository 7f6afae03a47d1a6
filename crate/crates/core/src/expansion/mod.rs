//! The dipole-core expansion: profiles, speed law, remainders, and the
//! vorticity–stream functional relation.

mod builder;
mod bundle;
mod frelation;
mod remainder;
mod speed;

pub use builder::{induction_step, residual_series, BundleBuilder, DEFAULT_ORDER_CAP, MAX_ORDER};
pub use bundle::{ExpansionBundle, OrderDiagnostics, BUNDLE_FORMAT_VERSION};
pub use frelation::{
    first_correction_identity_sup, functional_relation, theta_scan, FunctionalRelation,
    RelationOrder, ThetaSample, ThetaScan, DEFAULT_SIGMA1, NONRADIAL_TOL, TABLE_RADIUS,
};
pub use remainder::{
    remainder_delta_difference_norm, remainder_direct_norm, remainder_direct_norm_within,
    remainder_scan_delta,
    remainder_scan_eps, remainder_series, RemainderSample, RemainderScan, RemainderSeries,
};
pub use speed::{
    even_parity_defect, gaussian_speed, propulsion_alpha, quartic_coefficient_check, zeta_direct,
    zeta_series,
};
