use std::f64::consts::{FRAC_PI_2, LN_2, PI};

use num_complex::Complex64;

use crate::error::{require, Error, Result};
use crate::logcomplex::{wrap_phase, LogComplex};
use crate::specfun::{gauss_moment, hermite_he_pair_log};

/// ln Gamma(n/2).
fn ln_gamma_half(n: usize) -> f64 {
    if n % 2 == 0 {
        (1..n / 2).map(|k| (k as f64).ln()).sum()
    } else {
        0.5 * PI.ln() + (0..(n - 1) / 2).map(|k| (k as f64 + 0.5).ln()).sum::<f64>()
    }
}

/// Exact <det(mu_F - H) / det^{1/2}(mu_B - H)> for an N x N GOE matrix.
///
/// With x = sqrt(N) mu_F / J, y = sqrt(N) mu_B / (sqrt2 J), s = sgn Im mu_B
/// and a = -i s y the average is
/// (J^2/2N)^{N/4} e^{-i pi s N/4} / Gamma(N/2)
///   * [He_N(x) G_{N/2-1}(a) + i s sqrt2 He_{N-1}(x) G_{N/2}(a)].
pub fn c11_finite_n(mu_f: Complex64, mu_b: Complex64, n: usize, j: f64) -> Result<LogComplex> {
    require(n >= 1, "n", n as f64, "n >= 1")?;
    require(j > 0.0 && j.is_finite(), "j", j, "j > 0")?;
    if !mu_f.is_finite() || !mu_b.is_finite() {
        return Err(Error::InvalidInput(format!("non-finite spectral parameter {mu_f}, {mu_b}")));
    }
    if mu_b.im == 0.0 {
        return Err(Error::BranchAmbiguity(format!(
            "det^(-1/2)(mu_B - H) needs Im mu_B != 0, got mu_B = {mu_b}"
        )));
    }
    let s = mu_b.im.signum();
    let nn = n as f64;
    let x = mu_f * (nn.sqrt() / j);
    let y = mu_b * (nn.sqrt() / (2f64.sqrt() * j));
    let a = Complex64::new(0.0, -s) * y;
    let (he_prev, he_n) = hermite_he_pair_log(n, x);
    let g_lo = gauss_moment(0.5 * nn - 1.0, a)?.value;
    let g_hi = gauss_moment(0.5 * nn, a)?.value;
    let bracket = (he_n * g_lo).add(he_prev * g_hi * LogComplex::new(0.5 * LN_2, s * FRAC_PI_2));
    let log_pre = 0.25 * nn * (j * j / (2.0 * nn)).ln() - ln_gamma_half(n);
    let phase = wrap_phase(-0.25 * PI * s * (n % 8) as f64);
    Ok(LogComplex::new(log_pre, phase) * bracket)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, Domain, QuadOptions};
    use crate::specfun::hermite_he;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn direct_n1(mu_f: Complex64, mu_b: Complex64, j: f64) -> Complex64 {
        let f = |h: f64| (mu_f - h) / (mu_b - h).sqrt() * (-h * h / (4.0 * j * j)).exp() / (4.0 * PI * j * j).sqrt();
        let mut pts = vec![-40.0 * j, 40.0 * j];
        for p in [mu_f.re, mu_b.re] {
            if p.abs() < 40.0 * j {
                pts.push(p);
            }
        }
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        integrate(f, Domain::piecewise(&pts), &QuadOptions::new(0.0, 1e-13)).value
    }

    #[test]
    fn gamma_of_half_integers() {
        assert!((ln_gamma_half(1) - 0.5 * PI.ln()).abs() < 1e-15);
        assert_eq!(ln_gamma_half(2), 0.0);
        assert!((ln_gamma_half(7) - (3.323_350_970_447_842_6f64).ln()).abs() < 1e-14);
        assert!((ln_gamma_half(12) - 120f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn one_by_one_matches_single_integral() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let mu_f = c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let sgn = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let mu_b = c(rng.random_range(-2.0..2.0), sgn * rng.random_range(0.2..2.0));
            let j = rng.random_range(0.5..1.5);
            let got = c11_finite_n(mu_f, mu_b, 1, j).unwrap().to_complex();
            let want = direct_n1(mu_f, mu_b, j);
            assert!((got - want).norm() <= 1e-8 * want.norm(), "{mu_f} {mu_b}: {got} vs {want}");
        }
    }

    #[test]
    fn spec_point_n1() {
        let got = c11_finite_n(c(0.0, 1.0), c(0.0, 2.0), 1, 1.0).unwrap().to_complex();
        let want = direct_n1(c(0.0, 1.0), c(0.0, 2.0), 1.0);
        assert!((got - want).norm() <= 1e-8 * want.norm());
    }

    #[test]
    fn large_bosonic_argument_factorizes() {
        for n in [2usize, 3, 6, 9] {
            let mu_f = c(0.3, 0.5);
            let j = 1.2;
            let nn = n as f64;
            let want = (j / nn.sqrt()).powi(n as i32) * hermite_he(n, mu_f * nn.sqrt() / j);
            let dev = |b: f64| {
                let mu_b = c(0.0, b);
                let v = c11_finite_n(mu_f, mu_b, n, j).unwrap().to_complex();
                (v * mu_b.sqrt().powu(n as u32) - want).norm() / want.norm()
            };
            let (d3, d4) = (dev(1e3), dev(1e4));
            assert!(d3 < 0.05 && d4 < d3 / 5.0, "N={n}: {d3} {d4}");
        }
    }

    #[test]
    fn conjugation() {
        for n in [1usize, 4, 7] {
            let a = c11_finite_n(c(0.2, 0.4), c(-0.3, 0.9), n, 1.0).unwrap().to_complex();
            let b = c11_finite_n(c(0.2, -0.4), c(-0.3, -0.9), n, 1.0).unwrap().to_complex();
            assert!((a.conj() - b).norm() <= 1e-10 * a.norm());
        }
    }

    #[test]
    fn real_bosonic_argument_is_ambiguous() {
        assert!(matches!(c11_finite_n(c(0.0, 1.0), c(0.5, 0.0), 3, 1.0), Err(Error::BranchAmbiguity(_))));
    }
}
