//! One-sided Gaussian moments G_nu(a) = int_0^inf t^nu exp(-t^2/2 - a t) dt
//! and the functions F_n(z) = (i s)^n G_n(i s z), s = sgn Im z, built on them.
//!
//! Integer orders start from G_0 = sqrt(pi/2) erfcx(a/sqrt 2) and G_1 = 1 - a G_0
//! and run the three-term recurrence G_m = -a G_{m-1} + (m-1) G_{m-2}.
//! The recurrence carries a first-order relative error estimate; once that
//! exceeds the budget the value is recomputed by quadrature along a rotated
//! ray t = s e^{i phi}, where the oscillation that ruins the real-axis
//! integral is mostly removed.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use super::erf::faddeeva_w;
use crate::error::{require, Error, Result};
use crate::logcomplex::LogComplex;
use crate::quadrature::{integrate, Domain, QuadOptions};

/// Relative error beyond which the recurrence result is discarded.
const LADDER_BUDGET: f64 = 1e-9;
/// Accuracy assumed for the erfcx seed.
const SEED_ERROR: f64 = 2e-14;
const RESCALE: f64 = 1e150;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MomentMethod {
    Recurrence,
    Quadrature,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentValue {
    pub value: LogComplex,
    pub method: MomentMethod,
    /// Estimated relative error of `value`.
    pub rel_error: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CauchyFValue {
    pub order: f64,
    pub argument: Complex64,
    pub value: LogComplex,
    pub method: MomentMethod,
    pub rel_error: f64,
}

fn check_order(nu: f64) -> Result<()> {
    require(
        nu.is_finite() && nu > -1.0 && (2.0 * nu).fract() == 0.0,
        "nu",
        nu,
        "integer or half-integer order > -1",
    )
}

fn i() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

/// sqrt(pi/2) erfcx(a / sqrt 2) in log form, valid for any complex a.
fn g0(a: Complex64) -> LogComplex {
    let u = i() * a / 2f64.sqrt();
    let w = if u.im >= 0.0 {
        LogComplex::from_complex(faddeeva_w(u))
    } else {
        // w(u) = 2 exp(-u^2) - w(-u), with exp(-u^2) possibly huge
        LogComplex::exp(-u * u)
            .scale_real(2.0)
            .sub(LogComplex::from_complex(faddeeva_w(-u)))
    };
    w.scale_real(FRAC_PI_2.sqrt())
}

struct Ladder {
    scale: LogComplex,
    prev: Complex64,
    cur: Complex64,
    err_prev: f64,
    err_cur: f64,
    order: f64,
}

impl Ladder {
    /// Steps from (G_{nu-1}, G_nu) to (G_nu, G_{nu+1}).
    fn step(&mut self, a: Complex64) {
        let next_order = self.order + 1.0;
        let c = next_order - 1.0;
        let next = -a * self.cur + c * self.prev;
        let nn = next.norm();
        let err = if nn == 0.0 {
            f64::INFINITY
        } else {
            (a.norm() * self.cur.norm() * self.err_cur + c.abs() * self.prev.norm() * self.err_prev) / nn + f64::EPSILON
        };
        self.prev = self.cur;
        self.cur = next;
        self.err_prev = self.err_cur;
        self.err_cur = err;
        self.order = next_order;
        if nn > RESCALE {
            self.prev /= nn;
            self.cur /= nn;
            self.scale = self.scale.scale_real(nn);
        }
    }

    fn value(&self) -> LogComplex {
        self.scale * LogComplex::from_complex(self.cur)
    }
}

/// Seeds (G_{nu0-1}, G_{nu0}) for the recurrence; nu0 is 1 for integer
/// orders and 1/2 for half-integer orders.
fn seed_ladder(nu: f64, a: Complex64) -> Result<Ladder> {
    if nu.fract() == 0.0 {
        let s0 = g0(a);
        let s1 = LogComplex::ONE.sub(LogComplex::from_complex(a) * s0);
        let a_g0 = a.norm() * s0.log_mag().exp();
        let mag1 = s1.log_mag().exp();
        let err1 = (f64::EPSILON + a_g0 * SEED_ERROR) / mag1 + f64::EPSILON;
        Ok(Ladder {
            scale: s0,
            prev: Complex64::new(1.0, 0.0),
            cur: (s1 / s0).to_complex(),
            err_prev: SEED_ERROR,
            err_cur: if err1.is_finite() { err1 } else { f64::INFINITY },
            order: 1.0,
        })
    } else {
        let lo = gauss_moment_quad(-0.5, a)?;
        let hi = gauss_moment_quad(0.5, a)?;
        Ok(Ladder {
            scale: lo.value,
            prev: Complex64::new(1.0, 0.0),
            cur: (hi.value / lo.value).to_complex(),
            err_prev: lo.rel_error,
            err_cur: hi.rel_error,
            order: 0.5,
        })
    }
}

/// G_nu(a) for integer or half-integer nu > -1 and any complex a.
pub fn gauss_moment(nu: f64, a: Complex64) -> Result<MomentValue> {
    check_order(nu)?;
    if !a.is_finite() {
        return Err(Error::InvalidInput(format!("gauss_moment: non-finite argument {a}")));
    }
    if nu < 0.0 {
        return gauss_moment_quad(nu, a);
    }
    let mut ladder = seed_ladder(nu, a)?;
    let (value, err) = if nu == 0.0 {
        (ladder.scale, SEED_ERROR)
    } else if nu == ladder.order - 1.0 {
        (ladder.scale, ladder.err_prev)
    } else {
        while ladder.order < nu {
            ladder.step(a);
        }
        (ladder.value(), ladder.err_cur)
    };
    if err <= LADDER_BUDGET && !value.is_zero() && value.log_mag().is_finite() {
        return Ok(MomentValue {
            value,
            method: MomentMethod::Recurrence,
            rel_error: err,
        });
    }
    gauss_moment_quad(nu, a)
}

struct Ray {
    value: LogComplex,
    rel_error: f64,
    // int |f| / |int f|; large means cancellation along this ray
    cancellation: f64,
}

fn ray_integral(nu: f64, a: Complex64, phi: f64) -> Option<Ray> {
    let e = Complex64::from_polar(1.0, phi);
    let e2 = e * e;
    let c = e2.re;
    let ae = a * e;
    let b = ae.re;
    // magnitude exponent nu ln s - c s^2/2 - b s, maximal at s_peak
    let log_mag = |s: f64| {
        let p = if nu == 0.0 { 0.0 } else { nu * s.ln() };
        p - 0.5 * c * s * s - b * s
    };
    let s_peak = if nu > 0.0 {
        (-b + (b * b + 4.0 * c * nu).sqrt()) / (2.0 * c)
    } else {
        (-b / c).max(0.0)
    };
    let peak = if nu > 0.0 {
        log_mag(s_peak)
    } else {
        -0.5 * c * s_peak * s_peak - b * s_peak
    };
    let mut end = s_peak + 1.0;
    while log_mag(end) - peak > -45.0 {
        end = s_peak + 1.5 * (end - s_peak);
    }
    let phase = |s: f64| -0.5 * e2.im * s * s - ae.im * s;
    let g = |s: f64| -> Complex64 {
        if s <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar((log_mag(s) - peak).exp(), phase(s))
    };
    // s = u^2 removes the s^nu endpoint singularity for negative orders
    let substitute = nu < 0.0;
    let h = |u: f64| -> Complex64 {
        if substitute {
            g(u * u) * (2.0 * u)
        } else {
            g(u)
        }
    };
    let map = |s: f64| if substitute { s.sqrt() } else { s };
    let mut pts = vec![0.0];
    if s_peak > 1e-3 * end {
        pts.push(map(s_peak));
    }
    pts.push(map(end));
    let mag = integrate(
        |u: f64| h(u).norm(),
        Domain::piecewise(&pts),
        &QuadOptions::new(0.0, 1e-6).max_evals(20_000),
    );
    // the attainable accuracy is set by int |f|, not by |int f|
    let opts = QuadOptions::new(1e-13 * mag.value, 1e-13).max_evals(40_000);
    let r = integrate(h, Domain::piecewise(&pts), &opts);
    let vn = r.value.norm();
    if !vn.is_finite() || vn == 0.0 || !r.converged {
        return None;
    }
    let value = LogComplex::from_complex(r.value) * LogComplex::new(peak, phi * (nu + 1.0));
    Some(Ray {
        value,
        rel_error: r.abs_error / vn + mag.value * f64::EPSILON / vn,
        cancellation: mag.value / vn,
    })
}

/// G_nu(a) by quadrature along the best of several rotated rays.
pub fn gauss_moment_quad(nu: f64, a: Complex64) -> Result<MomentValue> {
    check_order(nu)?;
    let mut best: Option<Ray> = None;
    for k in 0..9 {
        let phi = -0.6 + 0.15 * k as f64;
        if let Some(r) = ray_integral(nu, a, phi) {
            if best.as_ref().is_none_or(|b| r.cancellation < b.cancellation) {
                best = Some(r);
            }
        }
    }
    let best = best.ok_or(Error::NoConvergence {
        what: "gauss moment quadrature",
        key: None,
    })?;
    Ok(MomentValue {
        value: best.value,
        method: MomentMethod::Quadrature,
        rel_error: best.rel_error,
    })
}

fn sign_of_im(z: Complex64) -> Result<f64> {
    if z.im == 0.0 || !z.is_finite() {
        return Err(Error::Domain {
            name: "z",
            value: z.im,
            expected: "finite z with Im z != 0",
        });
    }
    Ok(z.im.signum())
}

/// F_nu(z) = (i s)^nu G_nu(i s z) in log form for integer or half-integer
/// nu, with (i s)^nu = exp(i pi s nu / 2).
pub fn cauchy_f_nu_log(nu: f64, z: Complex64) -> Result<CauchyFValue> {
    let s = sign_of_im(z)?;
    let m = gauss_moment(nu, i() * s * z)?;
    Ok(CauchyFValue {
        order: nu,
        argument: z,
        value: m.value * LogComplex::new(0.0, 0.5 * PI * s * nu),
        method: m.method,
        rel_error: m.rel_error,
    })
}

pub fn cauchy_f_log(n: u32, z: Complex64) -> Result<CauchyFValue> {
    cauchy_f_nu_log(n as f64, z)
}

pub fn cauchy_f(n: u32, z: Complex64) -> Result<Complex64> {
    Ok(cauchy_f_log(n, z)?.value.to_complex())
}
