//! Large-N closed forms in the bulk, E + i omega / N with |E| < 2J.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{require, Error, Result};
use crate::logcomplex::LogComplex;
use crate::quadrature::{integrate, Domain, QuadOptions};
use crate::specfun::bessel::{k0, k1};
use crate::specfun::k0_tail;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BulkParams {
    pub e: f64,
    pub j: f64,
    pub n: usize,
    pub omegas_f: Vec<f64>,
    pub omegas_b: Vec<f64>,
}

impl BulkParams {
    pub fn new(e: f64, j: f64, n: usize, omegas_f: &[f64], omegas_b: &[f64]) -> Self {
        Self {
            e,
            j,
            n,
            omegas_f: omegas_f.to_vec(),
            omegas_b: omegas_b.to_vec(),
        }
    }

    fn check(&self, fermionic: usize, bosonic: usize) -> Result<()> {
        check_bulk(self.e, self.j)?;
        require(self.n >= 1, "n", self.n as f64, "n >= 1")?;
        if self.omegas_f.len() != fermionic || self.omegas_b.len() != bosonic {
            return Err(Error::InvalidInput(format!(
                "expected {fermionic} fermionic and {bosonic} bosonic omegas, got {} and {}",
                self.omegas_f.len(),
                self.omegas_b.len()
            )));
        }
        for &w in self.omegas_f.iter().chain(&self.omegas_b) {
            require(w.is_finite(), "omega", w, "finite omega")?;
        }
        for &w in &self.omegas_b {
            require(w != 0.0, "omega_b", w, "nonzero omega_b")?;
        }
        Ok(())
    }
}

fn check_bulk(e: f64, j: f64) -> Result<()> {
    require(j > 0.0 && j.is_finite(), "j", j, "j > 0")?;
    if !(e.abs() < 2.0 * j) {
        return Err(Error::OutOfBulk { e, j });
    }
    Ok(())
}

/// Semicircle density sqrt(4J^2 - E^2) / (2 pi J^2).
pub fn rho_bulk(e: f64, j: f64) -> Result<f64> {
    require(j > 0.0 && j.is_finite(), "j", j, "j > 0")?;
    if !(e.abs() <= 2.0 * j) {
        return Err(Error::OutOfBulk { e, j });
    }
    Ok((4.0 * j * j - e * e).sqrt() / (2.0 * PI * j * j))
}

/// A(E, N) = (2 pi J^2 rho + iE)^{N - 1/2} exp(i pi N rho E / 2).
pub fn a_factor(e: f64, n: usize, j: f64) -> Result<LogComplex> {
    check_bulk(e, j)?;
    let rho = rho_bulk(e, j)?;
    let nn = n as f64;
    let base = Complex64::new(2.0 * PI * j * j * rho, e);
    // |base| = 2J exactly
    let lm = (nn - 0.5) * (2.0 * j).ln();
    let ph = (nn - 0.5) * base.arg() + PI * nn * rho * e / 2.0;
    Ok(LogComplex::new(lm, ph))
}

/// i^k as an exact phase.
fn quarter_turns(k: i64) -> f64 {
    match k.rem_euclid(4) {
        0 => 0.0,
        1 => FRAC_PI_2,
        2 => PI,
        _ => -FRAC_PI_2,
    }
}

fn parity(n: usize) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// [z cosh z - sinh z] / z^3, with its Taylor series near 0.
pub(crate) fn bracket_over_cube(z: f64) -> f64 {
    if z.abs() < 0.1 {
        // sum_{k>=1} 2k z^{2k-2} / (2k+1)!
        let z2 = z * z;
        let mut term = 1.0 / 3.0;
        let mut sum = term;
        for k in 2..10 {
            let kf = k as f64;
            term *= z2 * kf / ((kf - 1.0) * (2.0 * kf) * (2.0 * kf + 1.0));
            sum += term;
        }
        sum
    } else {
        (z * z.cosh() - z.sinh()) / (z * z * z)
    }
}

fn sinhc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        1.0 + z * z / 6.0
    } else {
        z.sinh() / z
    }
}

/// C_{1,2}(omega_F; omega_B1, omega_B2) at large N.
pub fn c12_bulk(p: &BulkParams) -> Result<LogComplex> {
    p.check(1, 2)?;
    let (e, j, n) = (p.e, p.j, p.n);
    let wf = p.omegas_f[0];
    let (b1, b2) = (p.omegas_b[0], p.omegas_b[1]);
    let root = (4.0 * j * j - e * e).sqrt();
    if b1.signum() == b2.signum() {
        let s = Complex64::new(b1.signum() * root, e);
        return Ok(LogComplex::exp((2.0 * wf - b1 - b2) * s / (4.0 * j * j)));
    }
    let rho = rho_bulk(e, j)?;
    let a = a_factor(e, n, j)?;
    let unit = Complex64::from_polar(1.0, a.phase());
    let pr = PI * rho;
    let (u, v) = ((-pr * wf).exp(), (pr * wf).exp());
    let par = parity(n);
    let minus = unit * u - par * unit.conj() * v;
    let plus = unit * u + par * unit.conj() * v;
    let db = (b1 - b2).abs();
    let arg = 0.5 * pr * db;
    let bracket = minus * (b1 + b2 - 2.0 * wf) * k0(arg) + plus * db * k1(arg);
    let nn = n as f64;
    let log_pre = a.log_mag() - (PI * (2.0 * nn * rho).sqrt()).ln() - (nn + 1.0) * (2.0 * j).ln();
    let phase = quarter_turns(-(n as i64)) - e * (b1 + b2 - 2.0 * wf) / (4.0 * j * j);
    Ok(LogComplex::from_complex(bracket) * LogComplex::new(log_pre, phase))
}

/// C_{2,2}(omega_F1, omega_F2; omega_B1, omega_B2) at large N.
pub fn c22_bulk(p: &BulkParams) -> Result<LogComplex> {
    p.check(2, 2)?;
    let (e, j, n) = (p.e, p.j, p.n);
    let nn = n as f64;
    let (f1, f2) = (p.omegas_f[0], p.omegas_f[1]);
    let (b1, b2) = (p.omegas_b[0], p.omegas_b[1]);
    let rho = rho_bulk(e, j)?;
    let pr = PI * rho;
    let z = pr * (f1 - f2);
    let common_phase = e * (f1 + f2) / (2.0 * j * j) - e * (b1 + b2) / (4.0 * j * j);
    if b1.signum() == b2.signum() {
        let a = a_factor(e, n, j)?;
        let unit = Complex64::from_polar(1.0, a.phase());
        let h = parity(n) * unit + unit.conj();
        // (J/sqrt N)^N * sqrt2 (N/2J)^N e^{-N/2} e^{N E^2/4J^2} |A| * 3
        let log_pre = nn * (j / nn.sqrt()).ln() + 0.5 * 2f64.ln() + nn * (nn / (2.0 * j)).ln() - 0.5 * nn
            + nn * e * e / (4.0 * j * j)
            + a.log_mag()
            + 3f64.ln()
            - 0.5 * pr * (b1.abs() + b2.abs());
        let phase = quarter_turns(n as i64) + common_phase;
        return Ok(LogComplex::from_complex(h * bracket_over_cube(z)) * LogComplex::new(log_pre, phase));
    }
    let db = (b1 - b2).abs();
    let arg = 0.5 * pr * db;
    let pp = (f1 + f2) * (b1 + b2) - 2.0 * f1 * f2 - 2.0 * b1 * b2;
    let bracket = pp * k0(arg) * pr.powi(3) * bracket_over_cube(z) + pr * pr * db * k1(arg) * sinhc(z);
    let log_pre = 0.5 * (2.0 * nn / PI).ln() + (nn + 1.0) * j.ln() - 0.5 * nn + nn * e * e / (4.0 * j * j);
    Ok(LogComplex::from_real(bracket) * LogComplex::new(log_pre, common_phase))
}

/// Characteristic function of the level curvature, normalized to 1 at omega = 0.
pub fn curvature_cf(omega: f64, e: f64, j: f64) -> Result<Complex64> {
    check_bulk(e, j)?;
    if omega == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let c = (4.0 * j * j - e * e).sqrt() / (4.0 * j * j);
    let x = c * omega.abs();
    Ok(x * k1(x) * Complex64::from_polar(1.0, -e * omega / (4.0 * j * j)))
}

/// Curvature density (1 + 4c^2)^{-3/2} at the band center, J = 1.
pub fn curvature_pdf(c: f64) -> f64 {
    (1.0 + 4.0 * c * c).powf(-1.5)
}

/// R(x) = (2/pi) (|x|/J K0(|x|/J) + int_{|x|/J}^inf K0).
pub fn r_characteristic(x: f64, j: f64) -> Result<f64> {
    require(j > 0.0 && j.is_finite(), "j", j, "j > 0")?;
    require(x.is_finite(), "x", x, "finite x")?;
    if x == 0.0 {
        return Ok(1.0);
    }
    let y = x.abs() / j;
    Ok(2.0 / PI * (y * k0(y) + k0_tail(y)?))
}

/// Density of the off-diagonal K-matrix element at perfect coupling.
pub fn p_kab(k: f64) -> f64 {
    let k2 = k * k;
    let shape = if k.abs() < 1e-3 {
        // arsinh K / (K sqrt(1+K^2)) = 1 - 2K^2/3 + 8K^4/15 - ...
        1.0 - 2.0 * k2 / 3.0 + 8.0 * k2 * k2 / 15.0
    } else {
        k.asinh() / (k * (1.0 + k2).sqrt())
    };
    2.0 / (PI * PI * (1.0 + k2)) * (1.0 + shape)
}

/// Cumulative distribution of `p_kab` by quadrature.
pub fn p_kab_cdf(k: f64) -> f64 {
    if k == 0.0 {
        return 0.5;
    }
    let r = integrate(p_kab, Domain::finite(0.0, k.abs()), &QuadOptions::new(1e-14, 1e-12));
    0.5 + k.signum() * r.value
}

/// Large-N average of sgn det(E - H).
pub fn sign_average(e: f64, n: usize, j: f64) -> Result<LogComplex> {
    check_bulk(e, j)?;
    require(n >= 1, "n", n as f64, "n >= 1")?;
    let a = a_factor(e, n, j)?;
    let unit = Complex64::from_polar(1.0, a.phase());
    let nn = n as f64;
    let sum = unit + parity(n) * unit.conj();
    let log_pre = (2.0 * j * j).ln() - nn * (2.0 * j).ln() - 0.5 * (PI * nn).ln() - 0.75 * (4.0 * j * j - e * e).ln()
        + a.log_mag();
    let v = LogComplex::from_complex(sum) * LogComplex::new(log_pre, quarter_turns(-(n as i64)));
    Ok(v)
}

/// Two-channel averages reducible to C_{1,2} (equal signs) or to R (E = 0,
/// gamma1 x1 = -gamma2 x2).
pub fn m2_correlation(x1: f64, x2: f64, gamma1: f64, gamma2: f64, e: f64, j: f64, n: usize) -> Result<LogComplex> {
    require(x1 != 0.0, "x1", x1, "nonzero x1")?;
    require(x2 != 0.0, "x2", x2, "nonzero x2")?;
    require(gamma1 > 0.0, "gamma1", gamma1, "gamma1 > 0")?;
    require(gamma2 > 0.0, "gamma2", gamma2, "gamma2 > 0")?;
    let (y1, y2) = (gamma1 * x1, gamma2 * x2);
    if x1.signum() == x2.signum() {
        return c12_bulk(&BulkParams::new(e, j, n, &[0.0], &[y1, y2]));
    }
    if e == 0.0 && (y1 + y2).abs() <= 1e-12 * y1.abs() {
        return Ok(LogComplex::from_real(r_characteristic(y1, j)?));
    }
    Err(Error::NotImplemented(format!(
        "opposite-sign two-channel average with gamma1 x1 = {y1}, gamma2 x2 = {y2}, E = {e}"
    )))
}

/// The single multiplicative constant tying a proportional-only result to a
/// reference, fitted over a parameter grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    /// Least-squares c in values ~ c * reference.
    pub constant: Complex64,
    /// Coefficient of variation of the pointwise ratios.
    pub spread: f64,
    /// Largest |ratio / mean ratio - 1|.
    pub max_deviation: f64,
    pub points: usize,
}

impl Calibration {
    pub fn fit(values: &[Complex64], reference: &[Complex64]) -> Result<Self> {
        if values.len() != reference.len() || values.is_empty() {
            return Err(Error::InvalidInput(format!(
                "calibration needs matching non-empty grids, got {} and {}",
                values.len(),
                reference.len()
            )));
        }
        if reference.iter().any(|r| r.norm() == 0.0 || !r.is_finite()) || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("calibration reference must be finite and nonzero".into()));
        }
        let num: Complex64 = values.iter().zip(reference).map(|(v, r)| r.conj() * v).sum();
        let den: f64 = reference.iter().map(|r| r.norm_sqr()).sum();
        let ratios: Vec<Complex64> = values.iter().zip(reference).map(|(v, r)| v / r).collect();
        let m = ratios.len() as f64;
        let mean: Complex64 = ratios.iter().sum::<Complex64>() / m;
        let var = ratios.iter().map(|r| (r - mean).norm_sqr()).sum::<f64>() / m;
        let max_deviation = ratios.iter().map(|r| (r / mean - 1.0).norm()).fold(0.0, f64::max);
        Ok(Self {
            constant: num / den,
            spread: var.sqrt() / mean.norm(),
            max_deviation,
            points: ratios.len(),
        })
    }

    pub fn fit_real(values: &[f64], reference: &[f64]) -> Result<Self> {
        let c = |x: &[f64]| x.iter().map(|&v| Complex64::new(v, 0.0)).collect::<Vec<_>>();
        Self::fit(&c(values), &c(reference))
    }
}
