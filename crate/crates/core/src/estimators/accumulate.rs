use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::logcomplex::LogComplex;

/// Streaming mean and variance of complex samples held in log form.
///
/// Sums live in linear form relative to `exp(shift)`, where `shift` is the
/// largest log-magnitude seen so far; a larger sample rescales what is
/// already accumulated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Accumulator {
    count: u64,
    shift: f64,
    mean: Complex64,
    m2_re: f64,
    m2_im: f64,
}

impl Default for Accumulator {
    fn default() -> Self {
        Self {
            count: 0,
            shift: f64::NEG_INFINITY,
            mean: Complex64::new(0.0, 0.0),
            m2_re: 0.0,
            m2_im: 0.0,
        }
    }
}

impl Accumulator {
    fn rescale(&mut self, shift: f64) {
        let f = if self.shift == f64::NEG_INFINITY {
            0.0
        } else {
            (self.shift - shift).exp()
        };
        self.mean *= f;
        self.m2_re *= f * f;
        self.m2_im *= f * f;
        self.shift = shift;
    }

    pub(crate) fn push(&mut self, v: LogComplex) {
        if !v.is_zero() && v.log_mag() > self.shift {
            self.rescale(v.log_mag());
        }
        let x = if self.shift == f64::NEG_INFINITY {
            Complex64::new(0.0, 0.0)
        } else {
            v.scaled(self.shift)
        };
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        let d2 = x - self.mean;
        self.m2_re += d.re * d2.re;
        self.m2_im += d.im * d2.im;
    }

    /// Chan et al. pairwise combination; `other` follows `self` in index order.
    pub(crate) fn merge(&mut self, other: &Accumulator) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let mut b = *other;
        if b.shift > self.shift {
            self.rescale(b.shift);
        } else if self.shift > b.shift {
            b.rescale(self.shift);
        }
        let (na, nb) = (self.count as f64, b.count as f64);
        let n = na + nb;
        let d = b.mean - self.mean;
        self.mean += d * (nb / n);
        self.m2_re += b.m2_re + d.re * d.re * na * nb / n;
        self.m2_im += b.m2_im + d.im * d.im * na * nb / n;
        self.count += b.count;
    }

    pub(crate) fn count(&self) -> u64 {
        self.count
    }

    pub(crate) fn finish(&self, seed: u64, n_samples: u64) -> McEstimate {
        let n = self.count as f64;
        let se = |m2: f64| {
            if self.count < 2 {
                0.0
            } else {
                (m2 / (n - 1.0) / n).sqrt()
            }
        };
        McEstimate {
            mean: self.mean,
            shift: if self.shift == f64::NEG_INFINITY { 0.0 } else { self.shift },
            stderr_re: se(self.m2_re),
            stderr_im: se(self.m2_im),
            n_samples,
            n_used: self.count,
            seed,
        }
    }
}

/// Monte Carlo mean with standard errors, all relative to `exp(shift)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: Complex64,
    pub stderr_re: f64,
    pub stderr_im: f64,
    /// Common log-scale; also the largest per-sample log-magnitude.
    pub shift: f64,
    pub n_samples: u64,
    /// Samples that contributed (pole collisions are skipped).
    pub n_used: u64,
    pub seed: u64,
}

impl McEstimate {
    pub fn value(&self) -> LogComplex {
        LogComplex::from_complex(self.mean) * LogComplex::new(self.shift, 0.0)
    }

    /// Mean in linear form; overflows to infinity when the shift is huge.
    pub fn linear(&self) -> Complex64 {
        self.mean * self.shift.exp()
    }

    pub fn stderr_linear(&self) -> (f64, f64) {
        let s = self.shift.exp();
        (self.stderr_re * s, self.stderr_im * s)
    }

    /// |mean - target| in units of the componentwise standard error,
    /// taking the worse of the real and imaginary parts.
    pub fn z_score(&self, target: Complex64) -> f64 {
        let d = self.linear() - target;
        let (sr, si) = self.stderr_linear();
        let z = |x: f64, s: f64| {
            if s == 0.0 {
                if x == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                x.abs() / s
            }
        };
        z(d.re, sr).max(z(d.im, si))
    }
}
