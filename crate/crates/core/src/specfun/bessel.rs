//! Modified Bessel functions I0, I1, K0, K1 and the tail integral of K0.
//!
//! I-family: ascending series up to x = 20, Hankel asymptotic series above.
//! K-family: ascending series (with the logarithmic term) up to x = 2; above
//! that the representation K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt
//! is summed with the trapezoidal rule, which converges geometrically for
//! this analytic, doubly-exponentially decaying integrand. The step scales
//! like 1/sqrt(x) to follow the width of the integrand.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{require, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const I_SPLIT: f64 = 20.0;

fn i_series(x: f64, nu: u32) -> f64 {
    // sum_k (x/2)^{2k+nu} / (k! (k+nu)!)
    let q = 0.25 * x * x;
    let mut term = if nu == 0 { 1.0 } else { 0.5 * x };
    let mut sum = term;
    let mut k = 1.0;
    loop {
        term *= q / (k * (k + nu as f64));
        sum += term;
        if term <= 1e-17 * sum {
            break;
        }
        k += 1.0;
    }
    sum
}

fn i_asymptotic_scaled(x: f64, nu: u32) -> f64 {
    // e^{-x} I_nu(x) ~ (2 pi x)^{-1/2} sum_k (-1)^k a_k(nu) / x^k
    let mu = 4.0 * (nu * nu) as f64;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        let odd = 2.0 * k - 1.0;
        let next = term * -(mu - odd * odd) / (8.0 * k * x);
        if next.abs() > term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
        k += 1.0;
    }
    sum / (2.0 * PI * x).sqrt()
}

pub fn bessel_i0(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= I_SPLIT {
        i_series(ax, 0)
    } else {
        i_asymptotic_scaled(ax, 0) * ax.exp()
    }
}

pub fn bessel_i1(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= I_SPLIT {
        i_series(ax, 1)
    } else {
        i_asymptotic_scaled(ax, 1) * ax.exp()
    };
    v.copysign(x)
}

/// e^{-|x|} I0(x).
pub fn bessel_i0e(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= I_SPLIT {
        i_series(ax, 0) * (-ax).exp()
    } else {
        i_asymptotic_scaled(ax, 0)
    }
}

/// e^{-|x|} I1(x).
pub fn bessel_i1e(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= I_SPLIT {
        i_series(ax, 1) * (-ax).exp()
    } else {
        i_asymptotic_scaled(ax, 1)
    };
    v.copysign(x)
}

fn k0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut sum = 0.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * k);
        harmonic += 1.0 / k;
        let t = term * harmonic;
        sum += t;
        if t <= 1e-17 * sum {
            break;
        }
        k += 1.0;
    }
    -((0.5 * x).ln() + EULER_GAMMA) * i_series(x, 0) + sum
}

fn k1_series(x: f64) -> f64 {
    // 1/x + ln(x/2) I1(x) - (x/4) sum_k [psi(k+1) + psi(k+2)] (x^2/4)^k / (k! (k+1)!)
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut psi1 = -EULER_GAMMA;
    let mut psi2 = 1.0 - EULER_GAMMA;
    let mut sum = psi1 + psi2;
    let mut k = 1.0;
    loop {
        term *= q / (k * (k + 1.0));
        psi1 += 1.0 / k;
        psi2 += 1.0 / (k + 1.0);
        let t = term * (psi1 + psi2);
        sum += t;
        if t.abs() <= 1e-17 * sum.abs() {
            break;
        }
        k += 1.0;
    }
    1.0 / x + (0.5 * x).ln() * i_series(x, 1) - 0.25 * x * sum
}

/// e^x int_0^inf exp(-x cosh t) g(t) dt by the trapezoidal rule.
fn trapezoid_scaled(x: f64, g: impl Fn(f64) -> f64) -> f64 {
    let h = (0.5 / x.sqrt()).min(0.25);
    let mut sum = 0.5 * g(0.0);
    let mut k = 1.0;
    loop {
        let t = k * h;
        let arg = x * (t.cosh() - 1.0);
        let v = (-arg).exp() * g(t);
        sum += v;
        if arg > 745.0 || v <= 1e-18 * sum {
            break;
        }
        k += 1.0;
    }
    sum * h
}

pub(crate) fn k0(x: f64) -> f64 {
    if x <= 2.0 {
        k0_series(x)
    } else {
        k0e(x) * (-x).exp()
    }
}

pub(crate) fn k1(x: f64) -> f64 {
    if x <= 2.0 {
        k1_series(x)
    } else {
        k1e(x) * (-x).exp()
    }
}

pub(crate) fn k0e(x: f64) -> f64 {
    if x <= 2.0 {
        k0_series(x) * x.exp()
    } else {
        trapezoid_scaled(x, |_| 1.0)
    }
}

pub(crate) fn k1e(x: f64) -> f64 {
    if x <= 2.0 {
        k1_series(x) * x.exp()
    } else {
        trapezoid_scaled(x, f64::cosh)
    }
}

fn positive(x: f64) -> Result<()> {
    require(x > 0.0, "x", x, "x > 0 for the K family")
}

pub fn bessel_k0(x: f64) -> Result<f64> {
    positive(x)?;
    Ok(k0(x))
}

pub fn bessel_k1(x: f64) -> Result<f64> {
    positive(x)?;
    Ok(k1(x))
}

/// e^x K0(x), finite for all large x.
pub fn bessel_k0e(x: f64) -> Result<f64> {
    positive(x)?;
    Ok(k0e(x))
}

/// e^x K1(x).
pub fn bessel_k1e(x: f64) -> Result<f64> {
    positive(x)?;
    Ok(k1e(x))
}

/// int_x^inf K0(y) dy for x >= 0.
///
/// Swapping the order of integration in the cosh representation gives
/// int_0^inf exp(-x cosh t) / cosh t dt, which the same trapezoidal
/// sum evaluates; the integrand has its nearest poles at t = +-i pi/2.
pub fn k0_tail(x: f64) -> Result<f64> {
    require(x >= 0.0, "x", x, "x >= 0")?;
    if x == 0.0 {
        return Ok(FRAC_PI_2);
    }
    let h = if x >= 4.0 { (0.5 / x.sqrt()).min(0.25) } else { 0.25 };
    let mut sum = 0.5;
    let mut k = 1.0;
    loop {
        let t = k * h;
        let arg = x * (t.cosh() - 1.0);
        let v = (-arg).exp() / t.cosh();
        sum += v;
        if arg > 745.0 || v <= 1e-18 * sum {
            break;
        }
        k += 1.0;
    }
    Ok(sum * h * (-x).exp())
}
