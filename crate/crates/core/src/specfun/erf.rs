//! Faddeeva function w(z) = exp(-z^2) erfc(-iz) via Weideman's rational
//! expansion in the upper half-plane, reflected to the lower half-plane.
//!
//! With 40 terms the relative error is about 2e-14 for |z| <= 20.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

const TERMS: usize = 40;

struct Weideman {
    l: f64,
    coeffs: [f64; TERMS],
}

fn table() -> &'static Weideman {
    static T: OnceLock<Weideman> = OnceLock::new();
    T.get_or_init(|| {
        let n = TERMS;
        let m = 2 * n;
        let l = (n as f64 / 2f64.sqrt()).sqrt();
        // f(t) = exp(-t^2)(L^2 + t^2) sampled at t = L tan(theta/2); even in k
        let f: Vec<f64> = (0..m)
            .map(|k| {
                if k == 0 {
                    // theta = 0
                    l * l
                } else {
                    let t = l * (k as f64 * PI / m as f64 / 2.0).tan();
                    (-t * t).exp() * (l * l + t * t)
                }
            })
            .collect();
        let mut coeffs = [0.0; TERMS];
        for (idx, c) in coeffs.iter_mut().enumerate() {
            let j = (idx + 1) as f64;
            let mut s = f[0];
            for (k, fk) in f.iter().enumerate().skip(1) {
                s += 2.0 * fk * (PI * k as f64 * j / m as f64).cos();
            }
            *c = s / (2 * m) as f64;
        }
        Weideman { l, coeffs }
    })
}

fn w_upper(z: Complex64) -> Complex64 {
    let t = table();
    let i = Complex64::new(0.0, 1.0);
    let lmiz = t.l - i * z;
    let zz = (t.l + i * z) / lmiz;
    let mut p = Complex64::new(0.0, 0.0);
    for &c in t.coeffs.iter().rev() {
        p = p * zz + c;
    }
    2.0 * p / (lmiz * lmiz) + (1.0 / PI.sqrt()) / lmiz
}

/// Faddeeva function w(z) = exp(-z^2) erfc(-i z).
pub fn faddeeva_w(z: Complex64) -> Complex64 {
    if z.im >= 0.0 {
        w_upper(z)
    } else {
        // w(z) = 2 exp(-z^2) - w(-z)
        2.0 * (-z * z).exp() - w_upper(-z)
    }
}

/// Scaled complementary error function exp(z^2) erfc(z) = w(iz).
pub fn erfcx_complex(z: Complex64) -> Complex64 {
    faddeeva_w(Complex64::new(-z.im, z.re))
}

/// Complementary error function for complex argument.
pub fn erfc_complex(z: Complex64) -> Complex64 {
    if z.re >= 0.0 {
        (-z * z).exp() * w_upper(Complex64::new(-z.im, z.re))
    } else {
        let m = -z;
        2.0 - (-m * m).exp() * w_upper(Complex64::new(-m.im, m.re))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, Domain, QuadOptions};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm()
    }

    #[test]
    fn erfc_at_zero() {
        assert!(close(erfc_complex(c(0.0, 0.0)), c(1.0, 0.0), 1e-15));
    }

    #[test]
    fn reflection() {
        let z = c(0.3, 0.4);
        assert!(close(erfc_complex(-z), 2.0 - erfc_complex(z), 1e-12));
    }

    #[test]
    fn erfc_one_by_quadrature() {
        let r = integrate(|t: f64| (-t * t).exp(), Domain::half_line(1.0, 1.0), &QuadOptions::new(0.0, 1e-15));
        let q = 2.0 / PI.sqrt() * r.value;
        assert!((erfc_complex(c(1.0, 0.0)).re - q).abs() <= 1e-12 * q);
    }

    #[test]
    fn frozen_values() {
        // 30-digit reference values
        let cases = [
            (c(0.3, 0.4), c(0.61795676741698207935, -0.43125203623196416224)),
            (c(2.0, -1.0), c(-0.0036063427256517509129, -0.011259006028815025076)),
            (c(-1.5, 2.0), c(0.89495071022598246734, -0.69951168616312445695)),
            (c(5.0, 5.0), c(0.069620396256904884146, -0.038936190895121378954)),
            (c(0.0, 3.0), c(1.0, -1629.9946226015656511)),
            (c(12.0, -0.5), c(1.5056489184201658858e-64, -8.7212527083743381299e-65)),
            (c(-7.0, 0.2), c(2.0, -1.3427348252842103975e-23)),
            (c(1.0, 0.0), c(0.15729920705028513066, 0.0)),
        ];
        for (z, want) in cases {
            let got = erfc_complex(z);
            assert!(close(got, want, 1e-12), "erfc({z}) = {got}, want {want}");
        }
        let wcases = [
            (c(1.0, 1.0), c(0.30474420525691259246, 0.20821893820283162729)),
            (c(-6.3, 1e-8), c(1.478934550372351776e-10, -0.090727659684127367619)),
            (c(15.0, 2.0), c(0.0049592767536360468451, 0.037031124946824676506)),
            (c(0.5, -0.5), c(1.2220084158685705185, 1.1893393085928644093)),
        ];
        for (z, want) in wcases {
            let got = faddeeva_w(z);
            assert!(close(got, want, 1e-12), "w({z}) = {got}, want {want}");
        }
    }

    #[test]
    fn erfcx_is_scaled_erfc() {
        for z in [c(0.5, 0.2), c(3.0, -2.0), c(-1.0, 0.7)] {
            assert!(close(erfcx_complex(z), (z * z).exp() * erfc_complex(z), 1e-12));
        }
    }

    #[test]
    fn conjugate_symmetry() {
        for z in [c(0.5, 0.2), c(3.0, -2.0), c(-1.0, 0.7), c(9.0, 9.0)] {
            assert!(close(erfc_complex(z.conj()), erfc_complex(z).conj(), 1e-13));
        }
    }
}
