//! Complex zeta and the contour integrals behind the main term.

pub mod contour;
pub mod expint;
pub mod quad;
pub mod zeta;

pub use contour::{contour_i, contour_i_residue, perron_single, saddle_line_check, ContourResult, ContourSpec, SaddleLineCheck};
pub use zeta::{zeta_complex, zeta_complex_with};
