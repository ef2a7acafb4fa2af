//! The one-dimensional route to C_{1,2}, the large-N two-determinant
//! average, the integral form of R(x) and the k-fold integral behind the
//! |det|^{-k} moments.

use std::cell::Cell;

use num_complex::Complex64;

use crate::error::{require, Result};
use crate::quadrature::{integrate, Domain, QuadOptions, QuadratureResult};
use crate::specfun::bessel::{bessel_i0e, k0, k1};
use crate::specfun::k0_tail;

fn parity(n: usize) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// I1 = e^{w/J} + (-1)^N e^{-w/J} and its derivative in w.
fn i1_pair(omega_f: f64, n: usize, j: f64) -> (f64, f64) {
    let (up, down) = ((omega_f / j).exp(), (-omega_f / j).exp());
    let p = parity(n);
    (up + p * down, (up - p * down) / j)
}

/// int_0^inf dR/R (w_F I1 + I1'/R) exp(-w_B^2 R/2 - 1/(2 J^2 R)) at E = 0,
/// omega_B1 = -omega_B2 = omega_B, by quadrature in ln R.
pub fn c12_alt_integral(omega_f: f64, omega_b: f64, n: usize, j: f64) -> Result<QuadratureResult<f64>> {
    require(omega_f.is_finite(), "omega_f", omega_f, "finite omega_f")?;
    require(omega_b > 0.0 && omega_b.is_finite(), "omega_b", omega_b, "omega_b > 0")?;
    require(n >= 1, "n", n as f64, "n >= 1")?;
    require(j > 0.0 && j.is_finite(), "j", j, "j > 0")?;
    let (i1, di1) = i1_pair(omega_f, n, j);
    let f = |u: f64| {
        let r = u.exp();
        (omega_f * i1 + di1 / r) * (-omega_b * omega_b * r / 2.0 - 1.0 / (2.0 * j * j * r)).exp()
    };
    // both exponents reach -60 at the ends
    let lo = -(120.0 * j * j).ln();
    let hi = (120.0 / (omega_b * omega_b)).ln();
    let peak = (1.0 / (j * omega_b)).ln();
    let mag = integrate(|u| f(u).abs(), Domain::piecewise(&[lo, peak, hi]), &QuadOptions::new(0.0, 1e-6));
    Ok(integrate(
        f,
        Domain::piecewise(&[lo, peak, hi]),
        &QuadOptions::new(1e-15 * mag.value, 1e-13),
    ))
}

/// Closed form of the same integral:
/// 2 [w_F I1 K0(w_B/J) + w_B J I1' K1(w_B/J)].
pub fn c12_alt_closed(omega_f: f64, omega_b: f64, n: usize, j: f64) -> Result<f64> {
    require(omega_b > 0.0 && omega_b.is_finite(), "omega_b", omega_b, "omega_b > 0")?;
    require(j > 0.0 && j.is_finite(), "j", j, "j > 0")?;
    let (i1, di1) = i1_pair(omega_f, n, j);
    let y = omega_b / j;
    Ok(2.0 * (omega_f * i1 * k0(y) + omega_b * j * di1 * k1(y)))
}

/// Large-N <det(xi1 - H) det(xi2 - H)> up to a constant, for spectral
/// parameters i xi / N: [sinh z - z cosh z] / (xi1 - xi2)^3, z = (xi1 - xi2)/J.
pub fn two_charpoly_asymp(xi1: Complex64, xi2: Complex64, j: f64) -> Complex64 {
    let d = xi1 - xi2;
    let z = d / j;
    if z.norm() < 1e-2 {
        // -sum_{k>=1} 2k z^{2k-2} / (2k+1)!
        let z2 = z * z;
        let mut term = Complex64::new(1.0 / 3.0, 0.0);
        let mut sum = term;
        for k in 2..7 {
            let kf = k as f64;
            term *= z2 * (kf / ((kf - 1.0) * (2.0 * kf) * (2.0 * kf + 1.0)));
            sum += term;
        }
        return -sum / (j * j * j);
    }
    (z.sinh() - z * z.cosh()) / (d * d * d)
}

/// x K0(x) + int_x^inf K0 at x/J, the shape both R-integrals are compared to.
pub fn rx_reference(x: f64, j: f64) -> Result<f64> {
    require(j > 0.0 && j.is_finite(), "j", j, "j > 0")?;
    require(x.is_finite() && x != 0.0, "x", x, "finite nonzero x")?;
    let y = x.abs() / j;
    Ok(y * k0(y) + k0_tail(y)?)
}

/// Two-dimensional integral representation of R(x), in q = e^u variables,
/// up to a constant.
pub fn rx_integral(x: f64, j: f64) -> Result<QuadratureResult<f64>> {
    require(j > 0.0 && j.is_finite(), "j", j, "j > 0")?;
    require(x.is_finite() && x != 0.0, "x", x, "finite nonzero x")?;
    let y = x.abs() / j;
    let y2 = y * y;
    let f = |u1: f64, u2: f64| {
        let (q1, q2) = (u1.exp(), u2.exp());
        let s = q1 + q2;
        let a = y2 * (q1 - q2) / 4.0;
        let bracket = (1.0 + q1) * (1.0 + q2) / (q1 * q1 * q2 * q2) + 3.0 / (s * s) + 2.0 / (q1 * q2 * s);
        // -(q1 + q2) y^2/4 + |a| without the cancellation
        let lg = -0.5 * (1.0 / q1 + 1.0 / q2) - 0.5 * y2 * q1.min(q2);
        (q1 - q2).abs() / s.sqrt() * bessel_i0e(a.abs()) * lg.exp() * bracket
    };
    // symmetric in q1 <-> q2: twice the half below the diagonal
    let (lo, hi) = (-8.0, 40.0);
    let ok = Cell::new(true);
    let evals = Cell::new(0usize);
    let inner_opts = QuadOptions::new(1e-14, 1e-11);
    let outer = integrate(
        |u1: f64| {
            let r = integrate(|u2| f(u1, u2), Domain::finite(lo, u1), &inner_opts);
            ok.set(ok.get() && r.converged);
            evals.set(evals.get() + r.evals);
            r.value
        },
        Domain::piecewise(&[lo, 0.0, 10.0, hi]),
        &QuadOptions::new(0.0, 1e-10),
    );
    Ok(QuadratureResult {
        value: 2.0 * outer.value,
        abs_error: 2.0 * outer.abs_error,
        evals: outer.evals + evals.get(),
        converged: outer.converged && ok.get(),
    })
}

/// e^{k delta} int...int prod (lambda_i^2 - 1)^{-1/2} e^{-delta lambda_i}
/// prod_{i<j} |lambda_i - lambda_j| over lambda_i > 1, for k = 1, 2, with
/// lambda = cosh u.
pub fn fyokeat_rhs(k: usize, delta: f64) -> Result<QuadratureResult<f64>> {
    require(k == 1 || k == 2, "k", k as f64, "k = 1 or 2")?;
    require(delta > 0.0 && delta.is_finite(), "delta", delta, "delta > 0")?;
    let top = (1.0 + 80.0 / delta).acosh();
    let damp = |u: f64| (-delta * (u.cosh() - 1.0)).exp();
    if k == 1 {
        return Ok(integrate(damp, Domain::finite(0.0, top), &QuadOptions::new(0.0, 1e-13)));
    }
    let ok = Cell::new(true);
    let evals = Cell::new(0usize);
    let outer = integrate(
        |u1: f64| {
            let r = integrate(
                |u2: f64| damp(u2) * (u1.cosh() - u2.cosh()),
                Domain::finite(0.0, u1),
                &QuadOptions::new(0.0, 1e-13),
            );
            ok.set(ok.get() && r.converged);
            evals.set(evals.get() + r.evals);
            damp(u1) * r.value
        },
        Domain::finite(0.0, top),
        &QuadOptions::new(0.0, 1e-12),
    );
    Ok(QuadratureResult {
        value: 2.0 * outer.value,
        abs_error: 2.0 * outer.abs_error,
        evals: outer.evals + evals.get(),
        converged: outer.converged && ok.get(),
    })
}
