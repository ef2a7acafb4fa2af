use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::logcomplex::LogComplex;

/// Probabilists' Hermite polynomial He_n evaluated at a complex point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HermiteValue {
    pub order: usize,
    pub argument: Complex64,
    pub value: Complex64,
}

impl HermiteValue {
    pub fn new(order: usize, argument: Complex64) -> Self {
        Self {
            order,
            argument,
            value: hermite_he(order, argument),
        }
    }
}

/// He_n(z) by the forward recurrence He_{k+1} = z He_k - k He_{k-1}.
///
/// Overflows to infinity for large n |z|; use [`hermite_he_log`] there.
pub fn hermite_he(n: usize, z: Complex64) -> Complex64 {
    let mut prev = Complex64::new(1.0, 0.0);
    if n == 0 {
        return prev;
    }
    let mut cur = z;
    for k in 1..n {
        let next = z * cur - prev * k as f64;
        prev = cur;
        cur = next;
    }
    cur
}

/// He_n(z) in log-polar form.
pub fn hermite_he_log(n: usize, z: Complex64) -> LogComplex {
    hermite_he_pair_log(n, z).1
}

/// (He_{n-1}(z), He_n(z)) on a common rescaled recurrence; He_{-1} is taken as 0.
pub fn hermite_he_pair_log(n: usize, z: Complex64) -> (LogComplex, LogComplex) {
    if n == 0 {
        return (LogComplex::ZERO, LogComplex::ONE);
    }
    let mut shift = 0.0;
    let mut prev = Complex64::new(1.0, 0.0);
    let mut cur = z;
    for k in 1..n {
        let next = z * cur - prev * k as f64;
        prev = cur;
        cur = next;
        let m = cur.norm().max(prev.norm());
        if m > 1e150 || (m < 1e-150 && m > 0.0) {
            cur /= m;
            prev /= m;
            shift += m.ln();
        }
    }
    let lift = |v: Complex64| {
        let l = LogComplex::from_complex(v);
        if l.is_zero() {
            l
        } else {
            LogComplex::new(l.log_mag() + shift, l.phase())
        }
    };
    (lift(prev), lift(cur))
}
