//! Special functions: Hermite polynomials, the Faddeeva function and erfc,
//! the Gaussian moments behind F_N, and modified Bessel functions.

pub(crate) mod bessel;
mod erf;
mod gauss_moment;
mod hermite;

pub use bessel::{bessel_i0, bessel_i0e, bessel_i1, bessel_i1e, bessel_k0, bessel_k0e, bessel_k1, bessel_k1e, k0_tail};
pub use erf::{erfc_complex, erfcx_complex, faddeeva_w};
pub use gauss_moment::{
    cauchy_f, cauchy_f_log, cauchy_f_nu_log, gauss_moment, gauss_moment_quad, CauchyFValue, MomentMethod,
    MomentValue,
};
pub use hermite::{hermite_he, hermite_he_log, hermite_he_pair_log, HermiteValue};
