//! Independent evaluations used to cross-check the estimators and the
//! closed forms: the exact finite-N determinant for C_{1,1}, integral
//! representations at E = 0, the one-dimensional alternate route, and the
//! two-channel K-matrix checks.
//!
//! Integral representations are only known up to an overall constant; their
//! values are compared by ratio against a reference with
//! [`crate::asymptotics::Calibration`].

mod alt_route;
mod appendix;
mod exact;
mod finite_n;

pub use alt_route::{c12_alt_closed, c12_alt_integral, fyokeat_rhs, rx_integral, rx_reference, two_charpoly_asymp};
pub use appendix::{brouwer_density, brouwer_fourier_check, brouwer_joint, brouwer_marginal};
pub use exact::{c12_exact_integral, c22_exact_integral};
pub use finite_n::c11_finite_n;

use crate::quadrature::QuadratureResult;

/// Walks right from `start` until `log_f` has dropped `drop` below the
/// largest value seen. Assumes a single bump.
pub(crate) fn tail_cut(log_f: impl Fn(f64) -> f64, start: f64, drop: f64) -> f64 {
    let mut x = start;
    let mut step = 0.01_f64.max(1e-3 * start.abs());
    let mut best = log_f(x);
    loop {
        x += step;
        let v = log_f(x);
        if v > best || best.is_nan() {
            best = v;
        } else if v < best - drop {
            return x;
        }
        step *= 1.03;
    }
}

pub(crate) fn merge_flags<T, U>(r: QuadratureResult<T>, others: &[&QuadratureResult<U>]) -> QuadratureResult<T> {
    let converged = r.converged && others.iter().all(|o| o.converged);
    let evals = r.evals + others.iter().map(|o| o.evals).sum::<usize>();
    QuadratureResult { converged, evals, ..r }
}
