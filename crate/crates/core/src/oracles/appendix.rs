//! Two-channel K-matrix checks: marginals of the 2 x 2 matrix Cauchy density
//! det[1 + K^2]^{-3/2}, and the Fourier transform of the eigenvalue-difference
//! weight against the R(x) shape.

use std::cell::Cell;
use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

use crate::error::{require, Error, Result};
use crate::quadrature::{integrate, quad_adaptive, Domain, IntegralSpec, QuadOptions, QuadratureResult};

/// Fourier integrals are cut at |k1 - k2| = U; the discarded tail is
/// oscillatory and decays like U^{-5/2}.
const FOURIER_CUT: f64 = 1000.0;

/// det[1 + K^2]^{-3/2} for K = [[k11, k12], [k12, k22]].
pub fn brouwer_density(k11: f64, k12: f64, k22: f64) -> f64 {
    let re = 1.0 - k11 * k22 + k12 * k12;
    let im = k11 + k22;
    (re * re + im * im).powf(-1.5)
}

/// int dK22 det[1 + K^2]^{-3/2} by quadrature.
pub fn brouwer_joint(k11: f64, k12: f64) -> Result<QuadratureResult<f64>> {
    require(k11.is_finite(), "k11", k11, "finite k11")?;
    require(k12.is_finite(), "k12", k12, "finite k12")?;
    let a2 = 1.0 + k11 * k11;
    // the quadratic in K22 is centred at k11 k12^2 / (1 + k11^2)
    let centre = k11 * k12 * k12 / a2;
    let width = (a2 + k12 * k12) / a2;
    try_integrate_flagged(
        |b| brouwer_density(k11, k12, b),
        Domain::full_line(centre, width),
        &QuadOptions::new(0.0, 1e-12),
    )
}

fn try_integrate_flagged(
    f: impl Fn(f64) -> f64,
    d: Domain,
    opts: &QuadOptions,
) -> Result<QuadratureResult<f64>> {
    let r = integrate(f, d, opts);
    if r.value.is_finite() {
        Ok(r)
    } else {
        Err(Error::NoConvergence {
            what: "brouwer quadrature",
            key: None,
        })
    }
}

fn unnormalized_marginal(k12: f64, rel_tol: f64) -> QuadratureResult<f64> {
    let spec = IntegralSpec::new(vec![Domain::full_line(0.0, 1.0 + k12.abs()); 2]).tolerance(0.0, rel_tol);
    quad_adaptive(&spec, |v: &[f64]| brouwer_density(v[0], k12, v[1])).expect("two fixed axes")
}

fn normalization() -> &'static QuadratureResult<f64> {
    static Z: OnceLock<QuadratureResult<f64>> = OnceLock::new();
    Z.get_or_init(|| {
        let ok = Cell::new(true);
        let r = integrate(
            |k: f64| {
                let m = unnormalized_marginal(k, 1e-11);
                ok.set(ok.get() && m.converged);
                m.value
            },
            Domain::full_line(0.0, 1.0),
            &QuadOptions::new(0.0, 1e-10),
        );
        QuadratureResult {
            converged: r.converged && ok.get(),
            ..r
        }
    })
}

/// Marginal density of K12 from the 2 x 2 matrix Cauchy density, with the
/// K11, K22 integrals and the normalization all done numerically.
pub fn brouwer_marginal(k12: f64) -> Result<QuadratureResult<f64>> {
    require(k12.is_finite(), "k12", k12, "finite k12")?;
    let z = normalization();
    let m = unnormalized_marginal(k12, 1e-11);
    Ok(QuadratureResult {
        value: m.value / z.value,
        abs_error: m.abs_error / z.value + m.value * z.abs_error / (z.value * z.value),
        evals: m.evals,
        converged: m.converged && z.converged,
    })
}

/// int dk1 dk2 |k1 - k2| (1+k1^2)^{-3/2} (1+k2^2)^{-3/2} int_0^{2 pi} dphi
/// cos(x (k1 - k2) cos(2 phi) / 2), ordered as u = k1 - k2 outermost, the
/// k and phi integrals inside.
pub fn brouwer_fourier_check(x: f64) -> Result<QuadratureResult<f64>> {
    require(x > 0.0 && x.is_finite(), "x", x, "x > 0")?;
    let w = |k: f64| (1.0 + k * k).powf(-1.5);
    let ok = Cell::new(true);
    let evals = Cell::new(0usize);
    let track = |r: &QuadratureResult<f64>| {
        ok.set(ok.get() && r.converged);
        evals.set(evals.get() + r.evals);
    };
    let inner = QuadOptions::new(1e-13, 1e-11);
    let f = |u: f64| {
        let overlap = integrate(|k| w(k) * w(k - u), Domain::full_line(0.5 * u, 1.0 + 0.5 * u), &inner);
        track(&overlap);
        let t = 0.5 * x * u;
        // cos(t cos 2phi) has period pi/2 symmetry on [0, 2 pi]
        let angular = integrate(|phi: f64| (t * (2.0 * phi).cos()).cos(), Domain::finite(0.0, FRAC_PI_2), &inner);
        track(&angular);
        u * overlap.value * 4.0 * angular.value
    };
    // integrand even in u
    let period = 4.0 * std::f64::consts::PI / x;
    let mut pts = vec![0.0];
    while *pts.last().unwrap() + period < FOURIER_CUT {
        let next = pts.last().unwrap() + period;
        pts.push(next);
    }
    pts.push(FOURIER_CUT);
    let r = integrate(f, Domain::piecewise(&pts), &QuadOptions::new(0.0, 1e-10));
    Ok(QuadratureResult {
        value: 2.0 * r.value,
        abs_error: 2.0 * r.abs_error,
        evals: r.evals + evals.get(),
        converged: r.converged && ok.get(),
    })
}
