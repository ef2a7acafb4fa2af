//! Monte Carlo estimation of GOE averages from sampled spectra.
//!
//! Sample `i` is drawn from the stream keyed `(seed, i)`. Samples are
//! grouped in blocks of 1024 indices; each block is accumulated
//! sequentially and the blocks are merged in index order, so results are
//! bit-identical for any number of worker threads.

mod accumulate;
mod histogram;
mod kmatrix;
mod quantity;

use rayon::prelude::*;

pub use accumulate::McEstimate;
pub use histogram::{empirical_cf, empirical_density, ks_distance, CfPoint, Histogram};
pub use kmatrix::{estimate_rx, estimate_rx_many, sample_kab, sample_kab_many, KabParams};
pub use quantity::{evaluate_quantity, Factor, Power, QuantitySpec};

use crate::error::{Error, Result};
use crate::linalg::eigen_sym;
use crate::linalg::goe::sample_keyed;
use crate::logcomplex::LogComplex;
use crate::rng::StreamKey;
use accumulate::Accumulator;

pub(crate) const BLOCK: u64 = 1024;

/// Runs `f` on a dedicated pool of `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Accumulates `outputs` quantities over `n_samples` draws. `sample`
/// returns one value per quantity for draw `i`, or `None` for a sample that
/// hit a pole and must be skipped.
pub(crate) fn run_blocks(
    n_samples: u64,
    outputs: usize,
    sample: impl Fn(u64) -> Result<Vec<Option<LogComplex>>> + Sync,
) -> Result<Vec<Accumulator>> {
    let blocks = n_samples.div_ceil(BLOCK);
    let partial: Vec<Vec<Accumulator>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut acc = vec![Accumulator::default(); outputs];
            for i in b * BLOCK..((b + 1) * BLOCK).min(n_samples) {
                let values = sample(i)?;
                for (a, v) in acc.iter_mut().zip(values) {
                    if let Some(v) = v {
                        a.push(v);
                    }
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut total = vec![Accumulator::default(); outputs];
    for block in &partial {
        for (t, a) in total.iter_mut().zip(block) {
            t.merge(a);
        }
    }
    Ok(total)
}

pub(crate) fn check_samples(n_samples: u64) -> Result<()> {
    if n_samples < 2 {
        return Err(Error::InvalidInput(format!("n_samples must be at least 2, got {n_samples}")));
    }
    Ok(())
}

pub(crate) fn finish_all(acc: &[Accumulator], seed: u64, n_samples: u64) -> Result<Vec<McEstimate>> {
    acc.iter()
        .map(|a| {
            if a.count() == 0 {
                Err(Error::EstimationFailure("every sample collided with a pole".into()))
            } else {
                Ok(a.finish(seed, n_samples))
            }
        })
        .collect()
}

/// Eigenvalues of draw `index` under `seed`.
pub fn sample_spectrum(n: usize, j: f64, seed: u64, index: u64) -> Result<Vec<f64>> {
    let h = sample_keyed(n, j, StreamKey::new(seed, index))?;
    Ok(eigen_sym(&h)?.eigenvalues().to_vec())
}

/// Several quantities averaged over the same draws. All specs must share
/// N and J.
pub fn estimate_many(specs: &[QuantitySpec], n_samples: u64, seed: u64) -> Result<Vec<McEstimate>> {
    check_samples(n_samples)?;
    let first = specs
        .first()
        .ok_or_else(|| Error::InvalidInput("no quantities to estimate".into()))?;
    for q in specs {
        q.validate()?;
        if q.n != first.n || q.j != first.j {
            return Err(Error::InvalidInput("quantities estimated together must share N and J".into()));
        }
    }
    let acc = run_blocks(n_samples, specs.len(), |i| {
        let lambda = sample_spectrum(first.n, first.j, seed, i)?;
        specs
            .iter()
            .map(|q| match q.evaluate_on(&lambda) {
                Ok(v) => Ok(Some(v)),
                Err(Error::PoleCollision { .. }) => Ok(None),
                Err(e) => Err(e),
            })
            .collect()
    })?;
    finish_all(&acc, seed, n_samples)
}

pub fn estimate(q: &QuantitySpec, n_samples: u64, seed: u64) -> Result<McEstimate> {
    Ok(estimate_many(std::slice::from_ref(q), n_samples, seed)?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Side;
    use num_complex::Complex64;

    #[test]
    fn trivial_spec_is_exactly_one() {
        let q = QuantitySpec::new(0.1, 1.0, 6)
            .halfdet(0.5, Side::Plus)
            .inv_halfdet(0.5, Side::Plus);
        let e = estimate(&q, 300, 3).unwrap();
        assert_eq!(e.linear(), Complex64::new(1.0, 0.0));
        assert_eq!((e.stderr_re, e.stderr_im), (0.0, 0.0));
    }

    #[test]
    fn odd_sign_average_vanishes_at_center() {
        let q = QuantitySpec::new(0.0, 1.0, 21).sign_marker(0.0);
        let e = estimate(&q, 4000, 11).unwrap();
        assert!(e.z_score(Complex64::new(0.0, 0.0)) < 3.0, "{e:?}");
    }

    #[test]
    fn worker_count_does_not_change_bits() {
        let q = QuantitySpec::c12(0.2, 1.0, 10, 0.7, [1.3, -0.4]);
        let a = with_workers(1, || estimate(&q, 3000, 5)).unwrap().unwrap();
        let b = with_workers(2, || estimate(&q, 3000, 5)).unwrap().unwrap();
        let c = with_workers(8, || estimate(&q, 3000, 5)).unwrap().unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn shared_draws_match_single_estimates() {
        let q1 = QuantitySpec::c12(0.0, 1.0, 8, 1.0, [1.0, 1.0]);
        let q2 = QuantitySpec::new(0.0, 1.0, 8).sign_marker(0.3);
        let both = estimate_many(&[q1.clone(), q2.clone()], 2000, 9).unwrap();
        assert_eq!(both[0], estimate(&q1, 2000, 9).unwrap());
        assert_eq!(both[1], estimate(&q2, 2000, 9).unwrap());
    }

    #[test]
    fn equal_arguments_average_to_one() {
        // det(mu - H) / det^{1/2}(mu - H)^2 = 1 pointwise
        let q = QuantitySpec::c12(0.0, 1.0, 12, 1.0, [1.0, 1.0]);
        let e = estimate(&q, 500, 1).unwrap();
        assert!((e.linear() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn stderr_scales_like_inverse_root_n() {
        let q = QuantitySpec::new(0.0, 1.0, 6).inv_halfdet(1.0, Side::Plus).inv_halfdet(-1.0, Side::Minus);
        let mut ratios = Vec::new();
        for seed in 0..4 {
            let a = estimate(&q, 4000, seed).unwrap();
            let b = estimate(&q, 8000, seed + 100).unwrap();
            ratios.push(a.stderr_linear().0 / b.stderr_linear().0);
        }
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        assert!((mean / 2f64.sqrt() - 1.0).abs() < 0.2, "{ratios:?}");
    }

    #[test]
    fn rejects_bad_requests() {
        let q = QuantitySpec::new(0.0, 1.0, 3).det(1.0);
        assert!(estimate(&q, 1, 0).is_err());
        assert!(estimate_many(&[], 10, 0).is_err());
        let other = QuantitySpec::new(0.0, 1.0, 4).det(1.0);
        assert!(estimate_many(&[q, other], 10, 0).is_err());
    }
}
