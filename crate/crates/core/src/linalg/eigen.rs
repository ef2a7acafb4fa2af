//! Symmetric eigensolver: Householder reduction to tridiagonal form followed
//! by implicit QL with Wilkinson-type shifts (the classical tred2/tql2 pair).
//!
//! Storage is column-major so the inner loops of both stages walk memory
//! contiguously.

use serde::{Deserialize, Serialize};

use super::goe::GoeMatrix;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    n: usize,
    j: f64,
    eigenvalues: Vec<f64>,
}

impl Spectrum {
    /// Builds a spectrum from known eigenvalues (sorted on entry).
    pub fn from_eigenvalues(j: f64, mut eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::InvalidInput("empty spectrum".into()));
        }
        if eigenvalues.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite eigenvalue".into()));
        }
        crate::error::require(j > 0.0, "j", j, "j > 0")?;
        eigenvalues.sort_by(f64::total_cmp);
        Ok(Self {
            n: eigenvalues.len(),
            j,
            eigenvalues,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn j(&self) -> f64 {
        self.j
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }
}

/// All eigenvalues of `h`, ascending.
pub fn eigen_sym(h: &GoeMatrix) -> Result<Spectrum> {
    let n = h.n();
    let mut a = h.entries().to_vec();
    let (mut d, mut e) = tridiagonalize(&mut a, n, false);
    ql_implicit(&mut d, &mut e, None, n).map_err(|_| Error::NoConvergence {
        what: "symmetric QL iteration",
        key: h.key(),
    })?;
    d.sort_by(f64::total_cmp);
    Ok(Spectrum {
        n,
        j: h.j(),
        eigenvalues: d,
    })
}

/// Frobenius norm of H - Q diag(d) Q^T relative to the Frobenius norm of H,
/// using the accumulated eigenvectors. Diagnostic only.
pub fn eigen_residual(h: &GoeMatrix) -> Result<f64> {
    let n = h.n();
    let mut v = h.entries().to_vec();
    let (mut d, mut e) = tridiagonalize(&mut v, n, true);
    ql_implicit(&mut d, &mut e, Some(&mut v), n).map_err(|_| Error::NoConvergence {
        what: "symmetric QL iteration",
        key: h.key(),
    })?;
    let mut r2 = 0.0;
    for r in 0..n {
        for c in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                s += v[k * n + r] * d[k] * v[k * n + c];
            }
            r2 += (h.get(r, c) - s).powi(2);
        }
    }
    let hn = h.frobenius();
    Ok(if hn == 0.0 { r2.sqrt() } else { r2.sqrt() / hn })
}

/// Householder tridiagonalization of the symmetric matrix in `v`
/// (column-major; symmetric so the layout is immaterial on input).
/// Returns (diagonal, subdiagonal) with the subdiagonal in e[1..n].
/// When `accumulate` is set, `v` holds the orthogonal transform on return.
fn tridiagonalize(v: &mut [f64], n: usize, accumulate: bool) -> (Vec<f64>, Vec<f64>) {
    macro_rules! at {
        ($r:expr, $c:expr) => {
            v[($c) * n + ($r)]
        };
    }
    let mut d: Vec<f64> = (0..n).map(|j| at!(n - 1, j)).collect();
    let mut e = vec![0.0; n];

    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = at!(i - 1, j);
                at!(i, j) = 0.0;
                at!(j, i) = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                at!(j, i) = f;
                g = e[j] + at!(j, j) * f;
                for k in j + 1..i {
                    let vkj = at!(k, j);
                    g += vkj * d[k];
                    e[k] += vkj * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    at!(k, j) -= f * e[k] + g * d[k];
                }
                d[j] = at!(i - 1, j);
                at!(i, j) = 0.0;
            }
        }
        d[i] = h;
    }

    if !accumulate {
        for (i, di) in d.iter_mut().enumerate() {
            *di = at!(i, i);
        }
        e[0] = 0.0;
        return (d, e);
    }

    for i in 0..n.saturating_sub(1) {
        at!(n - 1, i) = at!(i, i);
        at!(i, i) = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = at!(k, i + 1) / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += at!(k, i + 1) * at!(k, j);
                }
                for k in 0..=i {
                    at!(k, j) -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            at!(k, i + 1) = 0.0;
        }
    }
    for j in 0..n {
        d[j] = at!(n - 1, j);
        at!(n - 1, j) = 0.0;
    }
    at!(n - 1, n - 1) = 1.0;
    e[0] = 0.0;
    (d, e)
}

/// Implicit QL on the tridiagonal (d, e); e[1..n] holds the subdiagonal.
/// Rotations are applied to the columns of `v` when given.
fn ql_implicit(d: &mut [f64], e: &mut [f64], mut v: Option<&mut [f64]>, n: usize) -> std::result::Result<(), ()> {
    if n == 1 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        // e[n-1] is zero, so m < n always holds here
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_SWEEPS {
                    return Err(());
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(v) = v.as_deref_mut() {
                        let (lo, hi) = v.split_at_mut((i + 1) * n);
                        let col_i = &mut lo[i * n..];
                        let col_i1 = &mut hi[..n];
                        for k in 0..n {
                            let hk = col_i1[k];
                            col_i1[k] = s * col_i[k] + c * hk;
                            col_i[k] = c * col_i[k] - s * hk;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}
