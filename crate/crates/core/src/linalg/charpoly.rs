use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::eigen::Spectrum;
use crate::error::{Error, Result};
use crate::logcomplex::LogComplex;

/// Spectral parameter mu = E + i omega / N in bulk units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexShift {
    pub e: f64,
    pub omega: f64,
    pub n: usize,
}

impl ComplexShift {
    pub fn new(e: f64, omega: f64, n: usize) -> Self {
        Self { e, omega, n }
    }

    /// A shift given directly by its complex value (N = 1 scaling).
    pub fn from_value(mu: Complex64) -> Self {
        Self {
            e: mu.re,
            omega: mu.im,
            n: 1,
        }
    }

    pub fn im(&self) -> f64 {
        self.omega / self.n as f64
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.e, self.im())
    }
}

/// Side of the real axis from which an omega = 0 factor is approached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }

    pub fn of(x: f64) -> Side {
        if x.is_sign_negative() {
            Side::Minus
        } else {
            Side::Plus
        }
    }
}

/// prod_j (mu - lambda_j).
pub fn charpoly_det(s: &Spectrum, mu: ComplexShift) -> LogComplex {
    det_of(s.eigenvalues(), mu.e, mu.im())
}

/// prod_j psqrt(mu - lambda_j) with per-factor principal roots.
///
/// For omega = 0 the factor (E - lambda) with lambda > E is read as
/// |E - lambda| e^{+-i pi}, the sign taken from `side`.
pub fn charpoly_halfdet(s: &Spectrum, mu: ComplexShift, side: Side) -> Result<LogComplex> {
    halfdet_of(s.eigenvalues(), mu.e, mu.im(), side)
}

/// |det(E - H)|.
pub fn abs_det(s: &Spectrum, e: f64) -> LogComplex {
    abs_det_of(s.eigenvalues(), e)
}

/// sgn det(E - H), or 0 when E is an eigenvalue.
pub fn sign_det(s: &Spectrum, e: f64) -> i8 {
    sign_det_of(s.eigenvalues(), e)
}

pub(crate) fn det_of(lambda: &[f64], e: f64, y: f64) -> LogComplex {
    if y == 0.0 {
        let mut lm = 0.0;
        let mut negatives = 0usize;
        for &l in lambda {
            let z = e - l;
            if z == 0.0 {
                return LogComplex::ZERO;
            }
            if z < 0.0 {
                negatives += 1;
            }
            lm += z.abs().ln();
        }
        return LogComplex::new(lm, if negatives % 2 == 1 { PI } else { 0.0 });
    }
    let y2 = y * y;
    let mut lm = 0.0;
    let mut ph = 0.0;
    for &l in lambda {
        let x = e - l;
        lm += (x * x + y2).ln();
        ph += y.atan2(x);
    }
    LogComplex::new(0.5 * lm, ph)
}

pub(crate) fn halfdet_of(lambda: &[f64], e: f64, y: f64, side: Side) -> Result<LogComplex> {
    if y == 0.0 {
        let mut lm = 0.0;
        let mut negatives = 0usize;
        for &l in lambda {
            let z = e - l;
            if z == 0.0 {
                return Err(Error::PoleCollision { eigenvalue: l });
            }
            if z < 0.0 {
                negatives += 1;
            }
            lm += z.abs().ln();
        }
        let quarter = (negatives % 4) as f64 * side.sign();
        return Ok(LogComplex::new(0.5 * lm, quarter * FRAC_PI_2));
    }
    let y2 = y * y;
    let mut lm = 0.0;
    let mut ph = 0.0;
    for &l in lambda {
        let x = e - l;
        lm += (x * x + y2).ln();
        ph += y.atan2(x);
    }
    Ok(LogComplex::new(0.25 * lm, 0.5 * ph))
}

pub(crate) fn abs_det_of(lambda: &[f64], e: f64) -> LogComplex {
    let mut lm = 0.0;
    for &l in lambda {
        let z = e - l;
        if z == 0.0 {
            return LogComplex::ZERO;
        }
        lm += z.abs().ln();
    }
    LogComplex::new(lm, 0.0)
}

pub(crate) fn sign_det_of(lambda: &[f64], e: f64) -> i8 {
    let mut neg = false;
    for &l in lambda {
        if l == e {
            return 0;
        }
        if l > e {
            neg = !neg;
        }
    }
    if neg {
        -1
    } else {
        1
    }
}
