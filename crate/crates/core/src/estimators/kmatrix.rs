use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_samples, finish_all, run_blocks, sample_spectrum, McEstimate, BLOCK};
use crate::error::{require, Error, Result};
use crate::linalg::{eigen_sym, sample_goe};
use crate::logcomplex::LogComplex;
use crate::rng::{RngStream, StreamKey};

const MAX_REDRAWS: usize = 64;

/// Channel model for the off-diagonal K-matrix element: GOE(N, J) and
/// Gaussian coupling vectors with variances gamma_a/N and gamma_b/N.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KabParams {
    pub e: f64,
    pub j: f64,
    pub n: usize,
    pub gamma_a: f64,
    pub gamma_b: f64,
}

impl KabParams {
    pub fn new(e: f64, j: f64, n: usize, gamma: f64) -> Self {
        Self {
            e,
            j,
            n,
            gamma_a: gamma,
            gamma_b: gamma,
        }
    }

    fn validate(&self) -> Result<()> {
        require(self.j > 0.0 && self.j.is_finite(), "j", self.j, "j > 0")?;
        require(self.n >= 1, "n", self.n as f64, "n >= 1")?;
        require(self.e.is_finite(), "e", self.e, "finite E")?;
        require(self.gamma_a > 0.0, "gamma_a", self.gamma_a, "gamma_a > 0")?;
        require(self.gamma_b > 0.0, "gamma_b", self.gamma_b, "gamma_b > 0")
    }
}

/// One draw of K_ab = sum_j u_j v_j / (E - lambda_j). By orthogonal
/// invariance the coupling vectors can be drawn directly in the eigenbasis.
/// `None` when E hits an eigenvalue exactly; the caller redraws.
pub fn sample_kab(p: &KabParams, rng: &mut RngStream) -> Result<Option<f64>> {
    p.validate()?;
    let h = sample_goe(p.n, p.j, rng)?;
    let s = eigen_sym(&h)?;
    let sa = (p.gamma_a / p.n as f64).sqrt();
    let sb = (p.gamma_b / p.n as f64).sqrt();
    let mut k = 0.0;
    for &l in s.eigenvalues() {
        let d = p.e - l;
        if d == 0.0 {
            return Ok(None);
        }
        let u: f64 = rng.sample(StandardNormal);
        let v: f64 = rng.sample(StandardNormal);
        k += sa * u * sb * v / d;
    }
    Ok(Some(k))
}

/// `count` draws, draw `i` from stream `(seed, i)`.
pub fn sample_kab_many(p: &KabParams, count: u64, seed: u64) -> Result<Vec<f64>> {
    p.validate()?;
    let blocks = count.div_ceil(BLOCK);
    let parts: Vec<Vec<f64>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            (b * BLOCK..((b + 1) * BLOCK).min(count))
                .map(|i| {
                    let key = StreamKey::new(seed, i);
                    let mut rng = key.stream();
                    for _ in 0..MAX_REDRAWS {
                        if let Some(k) = sample_kab(p, &mut rng)? {
                            return Ok(k);
                        }
                    }
                    Err(Error::NoConvergence {
                        what: "K-matrix redraw",
                        key: Some(key),
                    })
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    Ok(parts.concat())
}

/// Monte Carlo mean of |det(E - H)| / det^{1/2}[(E - H)^2 + gamma_a gamma_b x^2 / N^2].
/// Each factor is formed as a ratio, so x = 0 gives exactly 1.
pub fn estimate_rx(x: f64, p: &KabParams, n_samples: u64, seed: u64) -> Result<McEstimate> {
    Ok(estimate_rx_many(&[x], p, n_samples, seed)?.remove(0))
}

/// `estimate_rx` at several x on shared draws.
pub fn estimate_rx_many(xs: &[f64], p: &KabParams, n_samples: u64, seed: u64) -> Result<Vec<McEstimate>> {
    p.validate()?;
    check_samples(n_samples)?;
    for &x in xs {
        require(x.is_finite(), "x", x, "finite x")?;
    }
    let cs: Vec<f64> = xs
        .iter()
        .map(|x| p.gamma_a * p.gamma_b * x * x / (p.n * p.n) as f64)
        .collect();
    let acc = run_blocks(n_samples, cs.len(), |i| {
        let lambda = sample_spectrum(p.n, p.j, seed, i)?;
        let mut lm = vec![0.0; cs.len()];
        for &l in &lambda {
            let d = p.e - l;
            if d == 0.0 {
                return Ok(cs
                    .iter()
                    .map(|&c| Some(if c == 0.0 { LogComplex::ONE } else { LogComplex::ZERO }))
                    .collect());
            }
            for (m, c) in lm.iter_mut().zip(&cs) {
                *m -= 0.5 * (c / (d * d)).ln_1p();
            }
        }
        Ok(lm.into_iter().map(|m| Some(LogComplex::new(m, 0.0))).collect())
    })?;
    finish_all(&acc, seed, n_samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::{empirical_cf, with_workers};
    use num_complex::Complex64;

    #[test]
    fn shared_draws_match_single_runs() {
        let p = KabParams::new(0.0, 1.0, 12, 1.0);
        let many = estimate_rx_many(&[0.5, 2.0], &p, 3000, 9).unwrap();
        assert_eq!(many[1], estimate_rx(2.0, &p, 3000, 9).unwrap());
        assert_eq!(many[0], estimate_rx(0.5, &p, 3000, 9).unwrap());
    }

    #[test]
    fn rx_at_zero_is_exactly_one() {
        let e = estimate_rx(0.0, &KabParams::new(0.0, 1.0, 10, 1.0), 200, 4).unwrap();
        assert_eq!(e.linear(), Complex64::new(1.0, 0.0));
        assert_eq!(e.stderr_re, 0.0);
    }

    #[test]
    fn kab_mean_vanishes() {
        let k = sample_kab_many(&KabParams::new(0.0, 1.0, 20, 1.0), 4000, 2).unwrap();
        let n = k.len() as f64;
        let mean = k.iter().sum::<f64>() / n;
        // heavy tails: use the median absolute value as a robust scale
        let mut abs: Vec<f64> = k.iter().map(|x| x.abs()).collect();
        abs.sort_by(f64::total_cmp);
        let trimmed: Vec<f64> = k.iter().copied().filter(|x| x.abs() < 50.0 * abs[abs.len() / 2]).collect();
        let tm = trimmed.iter().sum::<f64>() / trimmed.len() as f64;
        let sd = (trimmed.iter().map(|x| (x - tm).powi(2)).sum::<f64>() / (trimmed.len() as f64 - 1.0)).sqrt();
        assert!(tm.abs() < 3.0 * sd / (trimmed.len() as f64).sqrt(), "{mean} {tm} {sd}");
    }

    #[test]
    fn cf_matches_rx_ratio() {
        let p = KabParams::new(0.0, 1.0, 40, 1.0);
        let k = sample_kab_many(&p, 6000, 8).unwrap();
        let cf = empirical_cf(&k, &[1.0]).unwrap()[0];
        let rx = estimate_rx(1.0, &p, 6000, 18).unwrap();
        let joint = (cf.stderr.powi(2) + rx.stderr_linear().0.powi(2)).sqrt();
        assert!((cf.mean - rx.linear().re).abs() < 3.0 * joint, "{} {}", cf.mean, rx.linear().re);
    }

    #[test]
    fn rx_decreases_in_x() {
        let p = KabParams::new(0.0, 1.0, 30, 1.0);
        let v: Vec<McEstimate> = [0.0, 1.0, 2.0].iter().map(|&x| estimate_rx(x, &p, 3000, 6).unwrap()).collect();
        for w in v.windows(2) {
            let gap = w[0].linear().re - w[1].linear().re;
            let se = (w[0].stderr_linear().0.powi(2) + w[1].stderr_linear().0.powi(2)).sqrt();
            assert!(gap > -3.0 * se);
        }
    }

    #[test]
    fn kab_draws_do_not_depend_on_workers() {
        let p = KabParams::new(0.3, 1.0, 12, 0.7);
        let a = with_workers(1, || sample_kab_many(&p, 2100, 1)).unwrap().unwrap();
        let b = with_workers(8, || sample_kab_many(&p, 2100, 1)).unwrap().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bad_params() {
        assert!(estimate_rx(1.0, &KabParams::new(0.0, 1.0, 10, -1.0), 10, 0).is_err());
        assert!(sample_kab_many(&KabParams::new(0.0, 0.0, 10, 1.0), 10, 0).is_err());
    }
}
