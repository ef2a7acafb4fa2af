//! Adaptive Gauss–Kronrod (10/21 point) quadrature with global subdivision,
//! infinite ranges through rational maps, and tensor nesting up to four
//! dimensions.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_802_236_392,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights belong to XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Values the engine can integrate.
pub trait Scalar: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync {
    fn zero() -> Self;
    fn norm(self) -> f64;
    fn is_finite(self) -> bool;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn norm(self) -> f64 {
        self.abs()
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn norm(self) -> f64 {
        Complex64::norm(self)
    }
    fn is_finite(self) -> bool {
        Complex64::is_finite(self)
    }
}

/// Integration range of one axis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Domain {
    /// [a, b] split at the given interior points; the list holds a, the
    /// breakpoints and b in increasing order.
    Finite(Vec<f64>),
    /// [start, inf) for scale > 0, (-inf, start] for scale < 0, mapped by
    /// x = start + scale t/(1-t).
    HalfLine { start: f64, scale: f64 },
    /// (-inf, inf) mapped by x = center + scale t/(1-t^2).
    FullLine { center: f64, scale: f64 },
}

impl Domain {
    pub fn finite(a: f64, b: f64) -> Self {
        Domain::Finite(vec![a, b])
    }

    /// Finite range with breakpoints at every listed point.
    pub fn piecewise(points: &[f64]) -> Self {
        Domain::Finite(points.to_vec())
    }

    pub fn half_line(start: f64, scale: f64) -> Self {
        Domain::HalfLine { start, scale }
    }

    pub fn full_line(center: f64, scale: f64) -> Self {
        Domain::FullLine { center, scale }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInput(format!("domain: {m}")));
        match self {
            Domain::Finite(p) => {
                if p.len() < 2 || p.iter().any(|x| !x.is_finite()) {
                    return bad("need at least two finite points");
                }
                if p.windows(2).any(|w| w[1] <= w[0]) {
                    return bad("points must increase");
                }
            }
            Domain::HalfLine { start, scale } | Domain::FullLine { center: start, scale } => {
                if !start.is_finite() || !scale.is_finite() || *scale == 0.0 {
                    return bad("finite anchor and nonzero scale required");
                }
            }
        }
        Ok(())
    }

    /// Intervals in the mapped variable.
    fn seeds(&self) -> Vec<(f64, f64)> {
        match self {
            Domain::Finite(p) => p.windows(2).map(|w| (w[0], w[1])).collect(),
            Domain::HalfLine { .. } => vec![(0.0, 0.5), (0.5, 1.0)],
            Domain::FullLine { .. } => vec![(-1.0, -0.5), (-0.5, 0.0), (0.0, 0.5), (0.5, 1.0)],
        }
    }

    /// Physical point and Jacobian for mapped variable t.
    fn map(&self, t: f64) -> (f64, f64) {
        match *self {
            Domain::Finite(_) => (t, 1.0),
            Domain::HalfLine { start, scale } => {
                let u = 1.0 - t;
                (start + scale * t / u, scale.abs() / (u * u))
            }
            Domain::FullLine { center, scale } => {
                let u = 1.0 - t * t;
                (center + scale * t / u, scale * (1.0 + t * t) / (u * u))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evals: usize,
}

impl QuadOptions {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            max_evals: 400_000,
        }
    }

    pub fn max_evals(mut self, n: usize) -> Self {
        self.max_evals = n;
        self
    }

    /// Same budget with both tolerances divided by `factor`.
    pub fn tightened(self, factor: f64) -> Self {
        Self {
            abs_tol: self.abs_tol / factor,
            rel_tol: self.rel_tol / factor,
            max_evals: self.max_evals,
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value)
    }
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self::new(0.0, 1e-10)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureResult<T> {
    pub value: T,
    pub abs_error: f64,
    pub evals: usize,
    pub converged: bool,
}

impl<T> QuadratureResult<T> {
    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> QuadratureResult<U> {
        QuadratureResult {
            value: f(self.value),
            abs_error: self.abs_error,
            evals: self.evals,
            converged: self.converged,
        }
    }
}

struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
    // integral of the auxiliary error density carried by nested integrands
    carried: f64,
    // error estimate is the rounding floor; splitting cannot reduce it
    at_floor: bool,
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl<T> Eq for Segment<T> {}
impl<T> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk21<T: Scalar>(f: &mut impl FnMut(f64) -> (T, f64), a: f64, b: f64) -> Segment<T> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut fv = [T::zero(); 21];
    let mut aux = 0.0;
    let (f0, e0) = f(c);
    fv[20] = f0;
    aux += WGK[10] * e0;
    for k in 0..10 {
        let dx = h * XGK[k];
        let (l, el) = f(c - dx);
        let (r, er) = f(c + dx);
        fv[2 * k] = l;
        fv[2 * k + 1] = r;
        aux += WGK[k] * (el + er);
    }
    let mut resk = f0 * WGK[10];
    let mut resg = T::zero();
    let mut resabs = f0.norm() * WGK[10];
    for k in 0..10 {
        let s = fv[2 * k] + fv[2 * k + 1];
        resk = resk + s * WGK[k];
        resabs += WGK[k] * (fv[2 * k].norm() + fv[2 * k + 1].norm());
        if k % 2 == 1 {
            resg = resg + s * WG[k / 2];
        }
    }
    let mean = resk * 0.5;
    let mut resasc = WGK[10] * (f0 - mean).norm();
    for k in 0..10 {
        resasc += WGK[k] * ((fv[2 * k] - mean).norm() + (fv[2 * k + 1] - mean).norm());
    }
    let ah = h.abs();
    let (resabs, resasc) = (resabs * ah, resasc * ah);
    let mut err = ((resk - resg) * h).norm();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    let mut at_floor = false;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) && err <= floor {
        err = floor;
        at_floor = true;
    }
    if !resk.is_finite() {
        err = f64::INFINITY;
    }
    Segment {
        a,
        b,
        value: resk * h,
        error: err,
        carried: aux * ah,
        at_floor,
    }
}

/// Core driver: `f` returns the integrand value and a nonnegative error
/// density that is integrated alongside and added to the error estimate.
fn adaptive<T: Scalar>(
    mut f: impl FnMut(f64) -> (T, f64),
    domain: &Domain,
    opts: &QuadOptions,
) -> Result<QuadratureResult<T>> {
    domain.validate()?;
    if !(opts.abs_tol >= 0.0 && opts.rel_tol >= 0.0) || (opts.abs_tol == 0.0 && opts.rel_tol == 0.0) {
        return Err(Error::InvalidInput("quadrature tolerance must be positive".into()));
    }
    let mut g = |t: f64| {
        let (x, jac) = domain.map(t);
        if !x.is_finite() || !jac.is_finite() {
            return (T::zero(), 0.0);
        }
        let (v, e) = f(x);
        (v * jac, e * jac.abs())
    };
    let mut heap = BinaryHeap::new();
    let mut evals = 0;
    for (a, b) in domain.seeds() {
        heap.push(gk21(&mut g, a, b));
        evals += 21;
    }
    let totals = |heap: &BinaryHeap<Segment<T>>| {
        let mut v = T::zero();
        let mut e = 0.0;
        // sum in a fixed order so results do not depend on heap layout
        let mut segs: Vec<&Segment<T>> = heap.iter().collect();
        segs.sort_by(|x, y| x.a.total_cmp(&y.a));
        for s in segs {
            v = v + s.value;
            e += s.error + s.carried;
        }
        (v, e)
    };
    let mut converged = false;
    loop {
        let (value, error) = totals(&heap);
        if error <= opts.target(value.norm()) {
            converged = true;
            break;
        }
        if evals + 42 > opts.max_evals || !error.is_finite() && evals > opts.max_evals / 2 {
            break;
        }
        let worst = heap.pop().expect("segments are never empty");
        if worst.at_floor {
            heap.push(worst);
            break;
        }
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) || (worst.b - worst.a).abs() < 1e-15 * mid.abs().max(1e-300) {
            heap.push(worst);
            break;
        }
        heap.push(gk21(&mut g, worst.a, mid));
        heap.push(gk21(&mut g, mid, worst.b));
        evals += 42;
    }
    let (value, abs_error) = totals(&heap);
    Ok(QuadratureResult {
        value,
        abs_error,
        evals,
        converged,
    })
}

/// One-dimensional adaptive integral of `f` over `domain`.
pub fn integrate<T: Scalar>(
    mut f: impl FnMut(f64) -> T,
    domain: Domain,
    opts: &QuadOptions,
) -> QuadratureResult<T> {
    match adaptive(|x| (f(x), 0.0), &domain, opts) {
        Ok(r) => r,
        Err(_) => QuadratureResult {
            value: T::zero(),
            abs_error: f64::INFINITY,
            evals: 0,
            converged: false,
        },
    }
}

/// Like [`integrate`] but reports malformed domains and tolerances.
pub fn try_integrate<T: Scalar>(
    mut f: impl FnMut(f64) -> T,
    domain: Domain,
    opts: &QuadOptions,
) -> Result<QuadratureResult<T>> {
    adaptive(|x| (f(x), 0.0), &domain, opts)
}

/// Tensor-product integral over up to four axes. The outermost axis is
/// `domains[0]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegralSpec {
    pub domains: Vec<Domain>,
    pub options: QuadOptions,
}

impl IntegralSpec {
    pub fn new(domains: Vec<Domain>) -> Self {
        Self {
            domains,
            options: QuadOptions::default(),
        }
    }

    pub fn tolerance(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.options.abs_tol = abs_tol;
        self.options.rel_tol = rel_tol;
        self
    }

    pub fn max_evals(mut self, n: usize) -> Self {
        self.options.max_evals = n;
        self
    }

    pub fn dimension(&self) -> usize {
        self.domains.len()
    }
}

/// Nested adaptive quadrature. Inner axes run with tolerances a factor
/// of ten tighter than the axis enclosing them; their error estimates are
/// integrated by the outer rule and added to the reported bound.
pub fn quad_adaptive<T: Scalar>(spec: &IntegralSpec, f: impl Fn(&[f64]) -> T) -> Result<QuadratureResult<T>> {
    let d = spec.dimension();
    if !(1..=4).contains(&d) {
        return Err(Error::InvalidInput(format!("quadrature dimension {d} not in 1..=4")));
    }
    let mut point = [0.0; 4];
    let mut evals = 0usize;
    let mut all_converged = true;
    let r = nest(spec, 0, &mut point, &f, &mut evals, &mut all_converged)?;
    Ok(QuadratureResult {
        value: r.value,
        abs_error: r.abs_error,
        evals,
        converged: r.converged && all_converged,
    })
}

fn nest<T: Scalar>(
    spec: &IntegralSpec,
    axis: usize,
    point: &mut [f64; 4],
    f: &impl Fn(&[f64]) -> T,
    evals: &mut usize,
    all_converged: &mut bool,
) -> Result<QuadratureResult<T>> {
    let d = spec.dimension();
    let opts = spec.options.tightened(10f64.powi(axis as i32));
    if axis + 1 == d {
        let r = adaptive(
            |x| {
                point[axis] = x;
                (f(&point[..d]), 0.0)
            },
            &spec.domains[axis],
            &opts,
        )?;
        *evals += r.evals;
        return Ok(r);
    }
    let mut failure = None;
    let r = adaptive(
        |x| {
            point[axis] = x;
            let mut inner_point = *point;
            match nest(spec, axis + 1, &mut inner_point, f, evals, all_converged) {
                Ok(inner) => {
                    if !inner.converged {
                        *all_converged = false;
                    }
                    (inner.value, inner.abs_error)
                }
                Err(e) => {
                    failure.get_or_insert(e);
                    (T::zero(), 0.0)
                }
            }
        },
        &spec.domains[axis],
        &opts,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(r)
}
