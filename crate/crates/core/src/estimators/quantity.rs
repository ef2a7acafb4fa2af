use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::charpoly::{abs_det_of, det_of, halfdet_of, sign_det_of};
use crate::linalg::{Side, Spectrum};
use crate::logcomplex::LogComplex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Power {
    One,
    Half,
}

/// One determinant factor det^p(E + i omega/N - H).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Factor {
    pub omega: f64,
    pub power: Power,
    /// Side of approach for omega = 0 half-powers; ignored otherwise.
    pub side: Option<Side>,
    /// Energy overriding the quantity's E for this factor.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
}

impl Factor {
    pub fn new(omega: f64, power: Power) -> Self {
        Self {
            omega,
            power,
            side: None,
            energy: None,
        }
    }

    pub fn on_axis(power: Power, side: Side) -> Self {
        Self {
            omega: 0.0,
            power,
            side: Some(side),
            energy: None,
        }
    }

    /// det^p(mu - H) at an arbitrary complex mu, written as mu = e + i omega/N.
    pub fn at(mu: Complex64, n: usize, power: Power) -> Self {
        Self {
            omega: mu.im * n as f64,
            power,
            side: None,
            energy: Some(mu.re),
        }
    }

    fn side(&self) -> Side {
        self.side.unwrap_or(Side::of(self.omega))
    }
}

/// A ratio of characteristic polynomials of one GOE matrix, optionally
/// decorated with |det(E_k - H)| and sgn det(E_k - H) factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantitySpec {
    pub e: f64,
    pub j: f64,
    pub n: usize,
    pub numerator: Vec<Factor>,
    pub denominator: Vec<Factor>,
    pub abs_markers: Vec<f64>,
    pub sign_markers: Vec<f64>,
}

impl QuantitySpec {
    pub fn new(e: f64, j: f64, n: usize) -> Self {
        Self {
            e,
            j,
            n,
            numerator: Vec::new(),
            denominator: Vec::new(),
            abs_markers: Vec::new(),
            sign_markers: Vec::new(),
        }
    }

    pub fn det(mut self, omega: f64) -> Self {
        self.numerator.push(Factor::new(omega, Power::One));
        self
    }

    pub fn halfdet(mut self, omega: f64, side: Side) -> Self {
        self.numerator.push(Factor {
            omega,
            power: Power::Half,
            side: Some(side),
            energy: None,
        });
        self
    }

    pub fn inv_halfdet(mut self, omega: f64, side: Side) -> Self {
        self.denominator.push(Factor {
            omega,
            power: Power::Half,
            side: Some(side),
            energy: None,
        });
        self
    }

    pub fn abs_marker(mut self, e: f64) -> Self {
        self.abs_markers.push(e);
        self
    }

    pub fn sign_marker(mut self, e: f64) -> Self {
        self.sign_markers.push(e);
        self
    }

    /// C_{1,2}: det(mu_F - H) / [det^{1/2}(mu_B1 - H) det^{1/2}(mu_B2 - H)].
    pub fn c12(e: f64, j: f64, n: usize, omega_f: f64, omega_b: [f64; 2]) -> Self {
        Self::new(e, j, n)
            .det(omega_f)
            .inv_halfdet(omega_b[0], Side::of(omega_b[0]))
            .inv_halfdet(omega_b[1], Side::of(omega_b[1]))
    }

    /// C_{2,2}: two determinants over two half-determinants.
    pub fn c22(e: f64, j: f64, n: usize, omega_f: [f64; 2], omega_b: [f64; 2]) -> Self {
        Self::new(e, j, n)
            .det(omega_f[0])
            .det(omega_f[1])
            .inv_halfdet(omega_b[0], Side::of(omega_b[0]))
            .inv_halfdet(omega_b[1], Side::of(omega_b[1]))
    }

    /// C_{1,1}: det(mu_F - H) / det^{1/2}(mu_B - H) at arbitrary complex points.
    pub fn c11(j: f64, n: usize, mu_f: Complex64, mu_b: Complex64) -> Self {
        let mut q = Self::new(mu_f.re, j, n);
        q.numerator.push(Factor::at(mu_f, n, Power::One));
        q.denominator.push(Factor::at(mu_b, n, Power::Half));
        q
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        if !(self.j > 0.0 && self.j.is_finite()) {
            return bad(format!("J must be positive, got {}", self.j));
        }
        if self.n == 0 {
            return bad("N must be at least 1".into());
        }
        if !self.e.is_finite() {
            return bad(format!("E must be finite, got {}", self.e));
        }
        for f in self.numerator.iter().chain(&self.denominator) {
            if !f.omega.is_finite() || f.energy.is_some_and(|e| !e.is_finite()) {
                return bad(format!("omega must be finite, got {}", f.omega));
            }
            if f.power == Power::Half && f.omega == 0.0 && f.side.is_none() {
                return bad("omega = 0 half-power needs an explicit side".into());
            }
        }
        if self.denominator.iter().any(|f| f.power != Power::Half) {
            return bad("denominator factors must be half-powers".into());
        }
        if self.abs_markers.iter().chain(&self.sign_markers).any(|x| !x.is_finite()) {
            return bad("markers must be finite".into());
        }
        Ok(())
    }

    fn factor_value(&self, lambda: &[f64], f: &Factor) -> Result<LogComplex> {
        let y = f.omega / self.n as f64;
        let e = f.energy.unwrap_or(self.e);
        match f.power {
            Power::One => Ok(det_of(lambda, e, y)),
            Power::Half => halfdet_of(lambda, e, y, f.side()),
        }
    }

    pub(crate) fn evaluate_on(&self, lambda: &[f64]) -> Result<LogComplex> {
        let mut v = LogComplex::ONE;
        for f in &self.numerator {
            v *= self.factor_value(lambda, f)?;
        }
        for f in &self.denominator {
            v /= self.factor_value(lambda, f)?;
        }
        for &e in &self.abs_markers {
            v *= abs_det_of(lambda, e);
        }
        for &e in &self.sign_markers {
            match sign_det_of(lambda, e) {
                0 => return Ok(LogComplex::ZERO),
                s if s < 0 => v = v.neg(),
                _ => {}
            }
        }
        Ok(v)
    }
}

/// Value of the quantity on one spectrum.
pub fn evaluate_quantity(s: &Spectrum, q: &QuantitySpec) -> Result<LogComplex> {
    if s.n() != q.n {
        return Err(Error::InvalidInput(format!(
            "spectrum has dimension {} but the quantity expects {}",
            s.n(),
            q.n
        )));
    }
    q.validate()?;
    q.evaluate_on(s.eigenvalues())
}

fn fmt_factor(f: &Factor, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let power = match f.power {
        Power::One => "",
        Power::Half => "^{1/2}",
    };
    if let Some(e) = f.energy {
        return write!(out, "det{power}({e} + i({})/N - H)", f.omega);
    }
    if f.omega == 0.0 {
        let side = match f.side() {
            Side::Plus => "+i0",
            Side::Minus => "-i0",
        };
        write!(out, "det{power}(E{side} - H)")
    } else {
        write!(out, "det{power}(E + i({})/N - H)", f.omega)
    }
}

impl fmt::Display for QuantitySpec {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "< ")?;
        let mut first = true;
        let mut sep = |out: &mut fmt::Formatter<'_>| {
            let r = if first { Ok(()) } else { write!(out, " ") };
            first = false;
            r
        };
        for f in &self.numerator {
            sep(out)?;
            fmt_factor(f, out)?;
        }
        for e in &self.abs_markers {
            sep(out)?;
            write!(out, "|det({e} - H)|")?;
        }
        for e in &self.sign_markers {
            sep(out)?;
            write!(out, "sgn det({e} - H)")?;
        }
        if first {
            write!(out, "1")?;
        }
        if !self.denominator.is_empty() {
            write!(out, " / [")?;
            for (k, f) in self.denominator.iter().enumerate() {
                if k > 0 {
                    write!(out, " ")?;
                }
                fmt_factor(f, out)?;
            }
            write!(out, "]")?;
        }
        write!(out, " >  (E = {}, J = {}, N = {})", self.e, self.j, self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigen_sym, sample_goe};
    use crate::rng::StreamKey;
    use proptest::prelude::*;

    fn spec(ev: &[f64]) -> Spectrum {
        Spectrum::from_eigenvalues(1.0, ev.to_vec()).unwrap()
    }

    #[test]
    fn identical_numerator_and_denominator_cancel() {
        let q = QuantitySpec::new(0.3, 1.0, 3)
            .halfdet(0.7, Side::Plus)
            .halfdet(-1.1, Side::Minus)
            .inv_halfdet(0.7, Side::Plus)
            .inv_halfdet(-1.1, Side::Minus);
        let v = evaluate_quantity(&spec(&[-1.0, 0.2, 1.4]), &q).unwrap();
        assert!(v.log_mag().abs() < 1e-15 && v.phase().abs() < 1e-15);
        let v = v.to_complex();
        assert!((v.re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hand_evaluated_ratio() {
        // N = 2, x = N: prod |lambda| / prod sqrt(lambda^2 + 1) = 1 / 2
        let q = QuantitySpec::new(0.0, 1.0, 2)
            .det(0.0)
            .inv_halfdet(2.0, Side::Plus)
            .inv_halfdet(-2.0, Side::Minus)
            .abs_marker(5.0)
            .sign_marker(5.0);
        let v = evaluate_quantity(&spec(&[-1.0, 1.0]), &q).unwrap().to_complex();
        // det(-H) = (1)(-1) = -1; |det(5 - H)| sgn = 24
        assert!((v.re + 0.5 * 24.0).abs() < 1e-13 && v.im.abs() < 1e-13, "{v}");
        let bare = QuantitySpec::new(0.0, 1.0, 2)
            .det(0.0)
            .inv_halfdet(2.0, Side::Plus)
            .inv_halfdet(-2.0, Side::Minus);
        let v = evaluate_quantity(&spec(&[-1.0, 1.0]), &bare).unwrap();
        assert!((v.to_complex().norm() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sign_marker_on_eigenvalue_gives_zero() {
        let q = QuantitySpec::new(0.0, 1.0, 2).sign_marker(1.0);
        assert!(evaluate_quantity(&spec(&[-1.0, 1.0]), &q).unwrap().is_zero());
    }

    #[test]
    fn pole_collision_propagates() {
        let q = QuantitySpec::new(1.0, 1.0, 2).inv_halfdet(0.0, Side::Plus);
        assert!(matches!(
            evaluate_quantity(&spec(&[-1.0, 1.0]), &q),
            Err(Error::PoleCollision { .. })
        ));
    }

    #[test]
    fn validation() {
        let q = QuantitySpec::new(0.0, 1.0, 2);
        assert!(evaluate_quantity(&spec(&[0.5]), &q).is_err());
        let mut q = QuantitySpec::new(0.0, 1.0, 1);
        q.denominator.push(Factor::new(1.0, Power::One));
        assert!(q.validate().is_err());
        let mut q = QuantitySpec::new(0.0, 1.0, 1);
        q.numerator.push(Factor::new(0.0, Power::Half));
        assert!(q.validate().is_err());
        assert!(QuantitySpec::new(0.0, -1.0, 1).validate().is_err());
    }

    #[test]
    fn display_reads_as_a_formula() {
        let q = QuantitySpec::c12(0.0, 1.0, 80, 1.0, [1.0, -1.0]);
        let s = q.to_string();
        assert!(s.contains("det(E + i(1)/N - H)"), "{s}");
        assert!(s.contains("/ [det^{1/2}(E + i(1)/N - H) det^{1/2}(E + i(-1)/N - H)]"), "{s}");
        assert!(s.ends_with("(E = 0, J = 1, N = 80)"));
    }

    proptest! {
        #[test]
        fn squared_half_powers_equal_integer_power(seed in 0u64..500, n in 1usize..12, w in -3.0..3.0f64) {
            let mut rng = StreamKey::new(seed, 0).stream();
            let s = eigen_sym(&sample_goe(n, 1.0, &mut rng).unwrap()).unwrap();
            let half = QuantitySpec::new(0.2, 1.0, n).halfdet(w, Side::Plus).halfdet(w, Side::Plus);
            let one = QuantitySpec::new(0.2, 1.0, n).det(w);
            let a = evaluate_quantity(&s, &half).unwrap();
            let b = evaluate_quantity(&s, &one).unwrap();
            prop_assert!((a.log_mag() - b.log_mag()).abs() < 1e-12);
            prop_assert!(crate::logcomplex::wrap_phase(a.phase() - b.phase()).abs() < 1e-12);
        }

        #[test]
        fn conjugate_pairs_are_positive(seed in 0u64..500, n in 1usize..12, w in 0.01..3.0f64, e in -1.5..1.5f64) {
            let mut rng = StreamKey::new(seed, 1).stream();
            let s = eigen_sym(&sample_goe(n, 1.0, &mut rng).unwrap()).unwrap();
            let q = QuantitySpec::new(e, 1.0, n).halfdet(w, Side::Plus).halfdet(-w, Side::Minus);
            let v = evaluate_quantity(&s, &q).unwrap();
            prop_assert!(v.phase().abs() < 1e-12);
            let q = QuantitySpec::new(e, 1.0, n).inv_halfdet(w, Side::Plus).inv_halfdet(-w, Side::Minus);
            prop_assert!(evaluate_quantity(&s, &q).unwrap().phase().abs() < 1e-12);
        }
    }
}
