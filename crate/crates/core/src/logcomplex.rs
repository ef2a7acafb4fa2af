use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::ops::{Div, DivAssign, Mul, MulAssign};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Wraps an angle into (-pi, pi].
pub fn wrap_phase(theta: f64) -> f64 {
    if theta > -PI && theta <= PI {
        return theta;
    }
    let t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t - 2.0 * PI
    } else {
        t
    }
}

/// A complex number stored as `exp(log_mag) * exp(i phase)`.
///
/// Zero is `log_mag = -inf` with phase 0. Products of a few hundred
/// determinant factors stay representable even when the linear value
/// would overflow.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogComplex {
    log_mag: f64,
    phase: f64,
}

impl LogComplex {
    pub const ZERO: LogComplex = LogComplex {
        log_mag: f64::NEG_INFINITY,
        phase: 0.0,
    };
    pub const ONE: LogComplex = LogComplex {
        log_mag: 0.0,
        phase: 0.0,
    };

    pub fn new(log_mag: f64, phase: f64) -> Self {
        if log_mag == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            Self {
                log_mag,
                phase: wrap_phase(phase),
            }
        }
    }

    pub fn from_complex(z: Complex64) -> Self {
        if z.re == 0.0 && z.im == 0.0 {
            return Self::ZERO;
        }
        Self::new(z.norm().ln(), z.arg())
    }

    pub fn from_real(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else if x > 0.0 {
            Self::new(x.ln(), 0.0)
        } else {
            Self::new((-x).ln(), PI)
        }
    }

    /// `exp(z)` for complex `z`.
    pub fn exp(z: Complex64) -> Self {
        Self::new(z.re, z.im)
    }

    pub fn log_mag(self) -> f64 {
        self.log_mag
    }

    pub fn phase(self) -> f64 {
        self.phase
    }

    pub fn is_zero(self) -> bool {
        self.log_mag == f64::NEG_INFINITY
    }

    pub fn to_complex(self) -> Complex64 {
        self.scaled(0.0)
    }

    /// Linear value divided by `exp(shift)`.
    pub fn scaled(self, shift: f64) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        let r = (self.log_mag - shift).exp();
        // keep real and imaginary axis values exact
        match self.phase {
            p if p == 0.0 => Complex64::new(r, 0.0),
            p if p == PI => Complex64::new(-r, 0.0),
            p if p == FRAC_PI_2 => Complex64::new(0.0, r),
            p if p == -FRAC_PI_2 => Complex64::new(0.0, -r),
            p => Complex64::from_polar(r, p),
        }
    }

    /// Natural logarithm on the principal branch.
    pub fn ln(self) -> Complex64 {
        Complex64::new(self.log_mag, self.phase)
    }

    pub fn conj(self) -> Self {
        if self.is_zero() {
            self
        } else {
            // -pi is not in range; the conjugate of a negative real stays at +pi
            Self::new(self.log_mag, -self.phase)
        }
    }

    pub fn recip(self) -> Self {
        Self::new(-self.log_mag, -self.phase)
    }

    pub fn powi(self, k: i32) -> Self {
        if self.is_zero() {
            return if k == 0 { Self::ONE } else { self };
        }
        Self::new(self.log_mag * k as f64, self.phase * k as f64)
    }

    /// Principal square root.
    pub fn sqrt(self) -> Self {
        if self.is_zero() {
            return self;
        }
        Self::new(0.5 * self.log_mag, 0.5 * self.phase)
    }

    pub fn scale_real(self, x: f64) -> Self {
        self * Self::from_real(x)
    }

    /// Sum of two values in log form.
    pub fn add(self, other: Self) -> Self {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        if self.log_mag == other.log_mag && (wrap_phase(self.phase - other.phase).abs() - PI).abs() < 4.0 * f64::EPSILON {
            return Self::ZERO;
        }
        let shift = self.log_mag.max(other.log_mag);
        let s = self.scaled(shift) + other.scaled(shift);
        let r = Self::from_complex(s);
        if r.is_zero() {
            r
        } else {
            Self::new(r.log_mag + shift, r.phase)
        }
    }

    pub fn neg(self) -> Self {
        if self.is_zero() {
            self
        } else {
            Self::new(self.log_mag, self.phase + PI)
        }
    }

    pub fn sub(self, other: Self) -> Self {
        self.add(other.neg())
    }
}

impl Default for LogComplex {
    fn default() -> Self {
        Self::ONE
    }
}

impl Mul for LogComplex {
    type Output = LogComplex;

    fn mul(self, rhs: LogComplex) -> LogComplex {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        LogComplex::new(self.log_mag + rhs.log_mag, self.phase + rhs.phase)
    }
}

impl MulAssign for LogComplex {
    fn mul_assign(&mut self, rhs: LogComplex) {
        *self = *self * rhs;
    }
}

impl Div for LogComplex {
    type Output = LogComplex;

    fn div(self, rhs: LogComplex) -> LogComplex {
        self * rhs.recip()
    }
}

impl DivAssign for LogComplex {
    fn div_assign(&mut self, rhs: LogComplex) {
        *self = *self / rhs;
    }
}

impl std::iter::Product for LogComplex {
    fn product<I: Iterator<Item = LogComplex>>(iter: I) -> Self {
        iter.fold(LogComplex::ONE, |a, b| a * b)
    }
}

impl From<Complex64> for LogComplex {
    fn from(z: Complex64) -> Self {
        Self::from_complex(z)
    }
}

impl From<f64> for LogComplex {
    fn from(x: f64) -> Self {
        Self::from_real(x)
    }
}

impl fmt::Display for LogComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exp({}) * exp(i {})", self.log_mag, self.phase)
    }
}
