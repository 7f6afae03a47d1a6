//! Concrete two-dimensional fields assembled from the polar data:
//! sampling at arbitrary positions, the physical dipole, contour
//! extraction, and CSV/SVG export.

mod contour;
mod grid2d;
mod sampler;
mod svg;

pub use contour::{contours_to_csv, extract_contours, Contour};
pub use grid2d::{assemble, physical_dipole, AssembledField, DipoleParams, Field2D, Grid2D};
pub use sampler::PolarSampler;
pub use svg::contours_to_svg;
