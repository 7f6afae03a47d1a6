//! Desk-scale pseudo-spectral validation of the translation-speed law.

mod fft;
mod measure;
mod solver;

pub use measure::{measure, trajectory_csv, SpeedPoint, ValidationReport};
pub use solver::{
    init_from_dipole, periodic_speed_bias, run, spectral_center_speed, DnsConfig, SpectralState,
    Trajectory, TrajectorySample,
};
