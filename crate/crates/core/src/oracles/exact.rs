//! Exact integral representations of C_{1,2} and C_{2,2} at E = 0 for
//! omega_B1 > 0 > omega_B2, evaluated up to their overall constants.
//!
//! Both integrands are polynomial in the fermionic variables once the
//! bosonic ones are fixed, so the fermionic integrals reduce to a handful of
//! moments computed once; only the two bosonic axes are integrated jointly.
//! J enters by rescaling: C_{K,L}(J; omega) = J^{N(K-L/2)} C_{K,L}(1; omega/J).

use crate::asymptotics::bracket_over_cube;
use crate::error::{require, Result};
use crate::quadrature::{integrate, quad_adaptive, Domain, IntegralSpec, QuadOptions, QuadratureResult};
use crate::specfun::bessel::k0;

use super::{merge_flags, tail_cut};

const DROP: f64 = 45.0;

fn check_common(omegas: &[f64], b1: f64, b2: f64, n: usize, max_n: usize, j: f64) -> Result<()> {
    require(j > 0.0 && j.is_finite(), "j", j, "j > 0")?;
    require((2..=max_n).contains(&n), "n", n as f64, "2 <= n within the oracle's range")?;
    for &w in omegas {
        require(w.is_finite(), "omega", w, "finite omega")?;
    }
    require(b1 > 0.0 && b1.is_finite(), "omega_b1", b1, "omega_b1 > 0")?;
    require(b2 < 0.0 && b2.is_finite(), "omega_b2", b2, "omega_b2 < 0")?;
    Ok(())
}

/// Integral of f over the real line with the accuracy referred to int |f|.
fn line_integral(f: impl Fn(f64) -> f64, lo: f64, hi: f64, breaks: &[f64]) -> QuadratureResult<f64> {
    let mut pts = vec![lo, hi];
    pts.extend(breaks.iter().copied().filter(|&b| b > lo && b < hi));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let dom = Domain::piecewise(&pts);
    let mag = integrate(|x| f(x).abs(), dom.clone(), &QuadOptions::new(0.0, 1e-6));
    integrate(f, dom, &QuadOptions::new(1e-12 * mag.value, 1e-12))
}

/// Bosonic weight (p1 p2)^{(N-3)/2} e^{-N(p1^2+p2^2)/4 - (b1+b2)(p1-p2)/4}
/// K0((b1-b2)(p1+p2)/4) (p1+p2), with the p = u^2 substitution folded in
/// for N = 2.
struct BosonicWeight {
    n: usize,
    b1: f64,
    b2: f64,
}

impl BosonicWeight {
    fn substituted(&self) -> bool {
        self.n < 3
    }

    fn upper(&self) -> f64 {
        let nn = self.n as f64;
        let drift = (self.b1 + self.b2).abs() / 4.0;
        let p = tail_cut(
            |p| 0.5 * (nn - 1.0) * p.ln() - nn * p * p / 4.0 + drift * p + 4.0 * (1.0 + p).ln(),
            1e-3,
            DROP,
        );
        if self.substituted() {
            p.sqrt()
        } else {
            p
        }
    }

    /// Returns (p1, p2, weight) at the integration point.
    fn at(&self, u1: f64, u2: f64) -> (f64, f64, f64) {
        let nn = self.n as f64;
        let (p1, p2, power) = if self.substituted() {
            (u1 * u1, u2 * u2, 4.0 * (u1 * u2).powi(self.n as i32 - 2))
        } else {
            (u1, u2, (u1 * u2).powf(0.5 * (nn - 3.0)))
        };
        let expo = -nn * (p1 * p1 + p2 * p2) / 4.0 - (self.b1 + self.b2) * (p1 - p2) / 4.0;
        let w = power * expo.exp() * k0((self.b1 - self.b2) * (p1 + p2) / 4.0) * (p1 + p2);
        (p1, p2, w)
    }
}

/// Exact C_{1,2}(omega_F; omega_B1, omega_B2) at E = 0 up to a constant.
pub fn c12_exact_integral(omega_f: f64, omega_b1: f64, omega_b2: f64, n: usize, j: f64) -> Result<QuadratureResult<f64>> {
    check_common(&[omega_f], omega_b1, omega_b2, n, 24, j)?;
    let (wf, b1, b2) = (omega_f / j, omega_b1 / j, omega_b2 / j);
    let nn = n as f64;
    // q-moments int q^{N-2+k} exp(-N q^2/2 - wf q - wf^2/2N) dq, k = 0, 1, 2
    let centre = -wf / nn;
    let moments: Vec<QuadratureResult<f64>> = (0..3)
        .map(|k| {
            let m = (n - 2 + k) as i32;
            let log_f = |q: f64| f64::from(m) * q.abs().ln() - nn * (q - centre).powi(2) / 2.0;
            let reach = tail_cut(|t| log_f(centre.abs() + t).max(log_f(-centre.abs() - t)), 0.0, DROP);
            let lim = centre.abs() + reach;
            line_integral(|q| q.powi(m) * (-nn * (q - centre).powi(2) / 2.0).exp(), -lim, lim, &[0.0, centre])
        })
        .collect();
    let m: Vec<f64> = moments.iter().map(|r| r.value).collect();
    let w = BosonicWeight { n, b1, b2 };
    let top = w.upper();
    let spec = IntegralSpec::new(vec![Domain::finite(0.0, top), Domain::finite(0.0, top)]).tolerance(0.0, 1e-9);
    let r = quad_adaptive(&spec, |u: &[f64]| {
        let (p1, p2, weight) = w.at(u[0], u[1]);
        weight * (m[2] + (p2 - p1) * m[1] - p1 * p2 * m[0])
    })?;
    Ok(merge_flags(r, &moments.iter().collect::<Vec<_>>()))
}

/// Exact C_{2,2}(omega_F1, omega_F2; omega_B1, omega_B2) at E = 0 up to a
/// constant, finite at omega_F1 = omega_F2.
pub fn c22_exact_integral(
    omega_f1: f64,
    omega_f2: f64,
    omega_b1: f64,
    omega_b2: f64,
    n: usize,
    j: f64,
) -> Result<QuadratureResult<f64>> {
    check_common(&[omega_f1, omega_f2], omega_b1, omega_b2, n, 12, j)?;
    let (f1, f2, b1, b2) = (omega_f1 / j, omega_f2 / j, omega_b1 / j, omega_b2 / j);
    let nn = n as f64;
    let d = f1 - f2;
    // (r1-r2) g((r1-r2) d/2) / d^3 = (r1-r2)^4/8 * [z cosh z - sinh z]/z^3
    let fermionic = |r1: f64, r2: f64| {
        let dr = r1 - r2;
        (r1 * r2).powi(n as i32 - 2)
            * (-nn * (r1 * r1 + r2 * r2) / 2.0 + (r1 + r2) * (f1 + f2) / 2.0).exp()
            * dr.powi(4)
            / 8.0
            * bracket_over_cube(dr * d / 2.0)
    };
    let growth = ((f1 + f2).abs() + d.abs()) / 2.0;
    let reach = tail_cut(|r| (nn + 4.0) * r.ln() - nn * r * r / 2.0 + growth * r, 1e-3, DROP);
    let square = || IntegralSpec::new(vec![Domain::piecewise(&[-reach, 0.0, reach]); 2]);
    // symmetric matrix of moments int r1^a r2^b (fermionic weight)
    let mut mom = [[0.0; 3]; 3];
    let mut parts = Vec::new();
    for a in 0..3 {
        for b in a..3 {
            let g = |r: &[f64]| r[0].powi(a as i32) * r[1].powi(b as i32) * fermionic(r[0], r[1]);
            let mag = quad_adaptive(&square().tolerance(0.0, 1e-5), |r: &[f64]| g(r).abs())?;
            let v = quad_adaptive(&square().tolerance(1e-11 * mag.value, 1e-11), g)?;
            mom[a][b] = v.value;
            mom[b][a] = v.value;
            parts.push(v);
        }
    }
    let w = BosonicWeight { n, b1, b2 };
    let top = w.upper();
    let spec = IntegralSpec::new(vec![Domain::finite(0.0, top), Domain::finite(0.0, top)]).tolerance(0.0, 1e-9);
    let r = quad_adaptive(&spec, |u: &[f64]| {
        let (p1, p2, weight) = w.at(u[0], u[1]);
        // (r + p1)(r - p2) = r^2 + (p1 - p2) r - p1 p2
        let c = [-p1 * p2, p1 - p2, 1.0];
        let mut q = 0.0;
        for (a, ca) in c.iter().enumerate() {
            for (b, cb) in c.iter().enumerate() {
                q += ca * cb * mom[a][b];
            }
        }
        weight * q
    })?;
    let scale = (-(f1 * f1 + f2 * f2) / (2.0 * nn)).exp() * j.powi(n as i32);
    let r = QuadratureResult {
        value: r.value * scale,
        abs_error: r.abs_error * scale,
        ..r
    };
    Ok(merge_flags(r, &parts.iter().collect::<Vec<_>>()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::{c12_bulk, c22_bulk, BulkParams, Calibration};
    use num_complex::Complex64;

    #[test]
    fn c12_ratio_to_bulk_form_is_flat() {
        let n = 16;
        let wfs = [0.0, 0.5, 1.0];
        let mut ex = Vec::new();
        let mut bulk = Vec::new();
        for &wf in &wfs {
            let r = c12_exact_integral(wf, 1.0, -1.0, n, 1.0).unwrap();
            assert!(r.converged, "{r:?}");
            ex.push(Complex64::new(r.value, 0.0));
            bulk.push(c12_bulk(&BulkParams::new(0.0, 1.0, n, &[wf], &[1.0, -1.0])).unwrap().to_complex());
        }
        let cal = Calibration::fit(&ex, &bulk).unwrap();
        assert!(cal.spread < 0.02, "{cal:?}");
    }

    #[test]
    fn c12_reflection_symmetry() {
        // omega -> -omega with the bosonic pair swapped multiplies by (-1)^N
        for n in [5usize, 8] {
            let a = c12_exact_integral(0.4, 1.3, -0.6, n, 1.0).unwrap().value;
            let b = c12_exact_integral(-0.4, 0.6, -1.3, n, 1.0).unwrap().value;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((b - sign * a).abs() < 1e-8 * a.abs(), "{a} {b}");
        }
    }

    #[test]
    fn c12_small_n_with_substitution() {
        let r = c12_exact_integral(0.3, 1.0, -1.0, 2, 1.0).unwrap();
        assert!(r.converged && r.value.is_finite());
        let s = c12_exact_integral(0.3, 1.0, -1.0, 2, 2.0).unwrap();
        let t = c12_exact_integral(0.15, 0.5, -0.5, 2, 1.0).unwrap();
        assert!((s.value - t.value).abs() < 1e-12 * t.value.abs());
    }

    #[test]
    fn c22_ratio_to_bulk_form_is_flat() {
        let n = 12;
        let mut ex = Vec::new();
        let mut bulk = Vec::new();
        for f1 in [0.2, 0.6, 1.0] {
            let r = c22_exact_integral(f1, 0.0, 1.0, -1.0, n, 1.0).unwrap();
            assert!(r.converged);
            ex.push(Complex64::new(r.value, 0.0));
            bulk.push(c22_bulk(&BulkParams::new(0.0, 1.0, n, &[f1, 0.0], &[1.0, -1.0])).unwrap().to_complex());
        }
        let cal = Calibration::fit(&ex, &bulk).unwrap();
        assert!(cal.spread < 0.05, "{cal:?}");
    }

    #[test]
    fn c22_symmetric_and_finite_at_coincidence() {
        let a = c22_exact_integral(0.7, -0.2, 1.0, -0.5, 6, 1.0).unwrap().value;
        let b = c22_exact_integral(-0.2, 0.7, 1.0, -0.5, 6, 1.0).unwrap().value;
        assert!((a - b).abs() < 1e-9 * a.abs());
        let at = c22_exact_integral(0.3, 0.3, 1.0, -1.0, 6, 1.0).unwrap();
        let near = c22_exact_integral(0.3 + 1e-4, 0.3, 1.0, -1.0, 6, 1.0).unwrap();
        assert!(at.converged && at.value.is_finite());
        assert!((at.value - near.value).abs() < 1e-3 * at.value.abs());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(c12_exact_integral(0.0, -1.0, -1.0, 8, 1.0).is_err());
        assert!(c12_exact_integral(0.0, 1.0, -1.0, 30, 1.0).is_err());
        assert!(c22_exact_integral(0.0, 0.1, 1.0, -1.0, 13, 1.0).is_err());
        assert!(c22_exact_integral(0.0, 0.1, 1.0, -1.0, 4, 0.0).is_err());
    }
}
