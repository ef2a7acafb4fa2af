use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{require, Error, Result};
use crate::rng::StreamKey;

/// Dense real symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoeMatrix {
    n: usize,
    j: f64,
    entries: Vec<f64>,
    key: Option<StreamKey>,
}

impl GoeMatrix {
    /// Wraps a caller-supplied symmetric matrix.
    pub fn from_symmetric(n: usize, j: f64, entries: Vec<f64>) -> Result<Self> {
        require(n >= 1, "n", n as f64, "n >= 1")?;
        require(j > 0.0, "j", j, "j > 0")?;
        if entries.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                entries.len()
            )));
        }
        for r in 0..n {
            for c in 0..r {
                if entries[r * n + c] != entries[c * n + r] {
                    return Err(Error::InvalidInput(format!("matrix not symmetric at ({r}, {c})")));
                }
            }
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        Ok(Self {
            n,
            j,
            entries,
            key: None,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn j(&self) -> f64 {
        self.j
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.entries[r * self.n + c]
    }

    /// Stream the matrix was drawn from, if it was sampled.
    pub fn key(&self) -> Option<StreamKey> {
        self.key
    }

    pub(crate) fn with_key(mut self, key: StreamKey) -> Self {
        self.key = Some(key);
        self
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.entries.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Draws H with density proportional to exp(-N Tr H^2 / (4 J^2)).
///
/// Tr H^2 = sum_i H_ii^2 + 2 sum_{i<k} H_ik^2, so the diagonal has variance
/// 2J^2/N and each off-diagonal pair J^2/N.
pub fn sample_goe<R: Rng + ?Sized>(n: usize, j: f64, rng: &mut R) -> Result<GoeMatrix> {
    require(n >= 1, "n", n as f64, "n >= 1")?;
    require(j > 0.0 && j.is_finite(), "j", j, "j > 0")?;
    let sd_off = j / (n as f64).sqrt();
    let sd_diag = sd_off * std::f64::consts::SQRT_2;
    let mut entries = vec![0.0; n * n];
    for r in 0..n {
        let z: f64 = rng.sample(StandardNormal);
        entries[r * n + r] = sd_diag * z;
        for c in r + 1..n {
            let z: f64 = rng.sample(StandardNormal);
            let v = sd_off * z;
            entries[r * n + c] = v;
            entries[c * n + r] = v;
        }
    }
    Ok(GoeMatrix {
        n,
        j,
        entries,
        key: None,
    })
}

/// Samples the matrix for Monte Carlo draw `key`.
pub(crate) fn sample_keyed(n: usize, j: f64, key: StreamKey) -> Result<GoeMatrix> {
    let mut rng = key.stream();
    Ok(sample_goe(n, j, &mut rng)?.with_key(key))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        let mut rng = StreamKey::new(1, 0).stream();
        assert!(matches!(sample_goe(0, 1.0, &mut rng), Err(Error::Domain { .. })));
        assert!(matches!(sample_goe(3, 0.0, &mut rng), Err(Error::Domain { .. })));
        assert!(matches!(sample_goe(3, -1.0, &mut rng), Err(Error::Domain { .. })));
    }

    #[test]
    fn exactly_symmetric() {
        let mut rng = StreamKey::new(2, 0).stream();
        let h = sample_goe(9, 1.3, &mut rng).unwrap();
        for r in 0..9 {
            for c in 0..9 {
                assert_eq!(h.get(r, c).to_bits(), h.get(c, r).to_bits());
            }
        }
    }

    #[test]
    fn one_by_one_variance_is_two() {
        let m = 200_000;
        let mut s2 = 0.0;
        for i in 0..m {
            let h = sample_keyed(1, 1.0, StreamKey::new(3, i)).unwrap();
            s2 += h.get(0, 0).powi(2);
        }
        let var = s2 / m as f64;
        // stderr of the sample variance is about 2 * sqrt(2/m)
        assert!((var - 2.0).abs() < 4.0 * 2.0 * (2.0 / m as f64).sqrt(), "{var}");
    }

    #[test]
    fn trace_square_moment_n4() {
        // E Tr H^2 = N * 2J^2/N + N(N-1) * J^2/N = J^2 (N+1)
        let m = 100_000u64;
        let (mut s, mut s2) = (0.0, 0.0);
        for i in 0..m {
            let h = sample_keyed(4, 1.0, StreamKey::new(4, i)).unwrap();
            let t = h.frobenius().powi(2);
            s += t;
            s2 += t * t;
        }
        let mean = s / m as f64;
        let se = ((s2 / m as f64 - mean * mean) / m as f64).sqrt();
        assert!((mean - 5.0).abs() < 4.0 * se, "{mean} +- {se}");
    }
}
