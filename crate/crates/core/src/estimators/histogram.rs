use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MIN_SAMPLES: usize = 100;

/// Density histogram normalized over the samples that fall in range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    pub density: Vec<f64>,
    pub density_stderr: Vec<f64>,
    pub in_range: u64,
    pub total: u64,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.bins() as f64
    }

    pub fn center(&self, k: usize) -> f64 {
        self.lo + (k as f64 + 0.5) * self.width()
    }

    pub fn in_range_fraction(&self) -> f64 {
        self.in_range as f64 / self.total as f64
    }
}

pub fn empirical_density(samples: &[f64], bins: usize, range: (f64, f64)) -> Result<Histogram> {
    let (lo, hi) = range;
    if bins == 0 {
        return Err(Error::InvalidInput("histogram needs at least one bin".into()));
    }
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::InvalidInput(format!("histogram range [{lo}, {hi}] is empty or infinite")));
    }
    if samples.len() < MIN_SAMPLES {
        return Err(Error::InvalidInput(format!(
            "histogram needs at least {MIN_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    for &x in samples {
        if x >= lo && x <= hi {
            let k = (((x - lo) / width) as usize).min(bins - 1);
            counts[k] += 1;
        }
    }
    let in_range: u64 = counts.iter().sum();
    let m = in_range.max(1) as f64;
    let density = counts.iter().map(|&c| c as f64 / (m * width)).collect();
    let density_stderr = counts
        .iter()
        .map(|&c| {
            let p = c as f64 / m;
            (p * (1.0 - p) / m).sqrt() / width
        })
        .collect();
    Ok(Histogram {
        lo,
        hi,
        counts,
        density,
        density_stderr,
        in_range,
        total: samples.len() as u64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CfPoint {
    pub x: f64,
    pub mean: f64,
    pub stderr: f64,
}

/// Sample mean of cos(x K) with its standard error at every x.
pub fn empirical_cf(samples: &[f64], xs: &[f64]) -> Result<Vec<CfPoint>> {
    if samples.len() < 2 {
        return Err(Error::InvalidInput("characteristic function needs at least two samples".into()));
    }
    let n = samples.len() as f64;
    Ok(xs
        .iter()
        .map(|&x| {
            let mean = samples.iter().map(|k| (x * k).cos()).sum::<f64>() / n;
            let ss = samples.iter().map(|k| ((x * k).cos() - mean).powi(2)).sum::<f64>();
            CfPoint {
                x,
                mean,
                stderr: (ss / (n - 1.0) / n).sqrt(),
            }
        })
        .collect())
}

/// Kolmogorov–Smirnov distance between the samples and a continuous CDF.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}
