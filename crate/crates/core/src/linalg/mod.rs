//! GOE sampling, the symmetric eigensolver, and determinant evaluation
//! from a spectrum.

pub(crate) mod charpoly;
pub(crate) mod eigen;
pub(crate) mod goe;

pub use charpoly::{abs_det, charpoly_det, charpoly_halfdet, sign_det, ComplexShift, Side};
pub use eigen::{eigen_residual, eigen_sym, Spectrum};
pub use goe::{sample_goe, GoeMatrix};
