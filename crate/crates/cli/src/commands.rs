//! estimate, eval, oracle and sample-spectra.

use goe_charpoly::asymptotics::{
    c12_bulk, c22_bulk, curvature_cf, m2_correlation, p_kab, p_kab_cdf, r_characteristic, sign_average, BulkParams,
};
use goe_charpoly::estimators::{
    empirical_density, estimate as mc_estimate, estimate_rx_many, ks_distance, sample_kab_many, sample_spectrum, KabParams, McEstimate,
    QuantitySpec,
};
use goe_charpoly::oracles::{
    brouwer_marginal, c11_finite_n, c12_alt_integral, c12_exact_integral, c22_exact_integral, rx_integral,
};
use goe_charpoly::quadrature::QuadratureResult;
use goe_charpoly::LogComplex;
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::config::{QuantityChoice, Route, RunConfig};
use crate::record::{to_map, Artifacts, Estimate, Params, ResultRecord, Table, Verdict};
use crate::{CliError, UsageError};

pub const DEFAULT_SAMPLES: u64 = 40_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    C12,
    C22,
    C11,
    Rx,
    SignAvg,
    CurvatureCf,
    KabDensity,
    M2,
}

impl Preset {
    pub const NAMES: [&'static str; 8] = ["c12", "c22", "c11", "rx", "sign-avg", "curvature-cf", "kab-density", "m2"];

    pub fn parse(name: &str) -> Result<Self, UsageError> {
        Ok(match name {
            "c12" => Self::C12,
            "c22" => Self::C22,
            "c11" => Self::C11,
            "rx" => Self::Rx,
            "sign-avg" => Self::SignAvg,
            "curvature-cf" => Self::CurvatureCf,
            "kab-density" => Self::KabDensity,
            "m2" => Self::M2,
            _ => {
                return Err(UsageError::new(
                    "preset",
                    format!("unknown preset {name:?}; expected one of {}", Self::NAMES.join(", ")),
                ))
            }
        })
    }

    fn default_n(self) -> usize {
        match self {
            Self::C11 => 4,
            _ => 80,
        }
    }
}

pub fn params(cfg: &RunConfig, n: usize, extra: Map<String, Value>) -> Params {
    Params {
        e: cfg.e(),
        j: cfg.j(),
        n,
        omega_f: cfg.omega_f().to_vec(),
        omega_b: cfg.omega_b().to_vec(),
        extra,
    }
}

fn extra_for(cfg: &RunConfig, preset: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("preset".into(), json!(preset));
    if let Some(x) = &cfg.x {
        m.insert("x".into(), json!(x));
    }
    if let Some(g) = &cfg.gamma {
        m.insert("gamma".into(), json!(g));
    }
    if let Some(t) = cfg.tol {
        m.insert("tol".into(), json!(t));
    }
    m
}

fn gamma(cfg: &RunConfig) -> Result<f64, UsageError> {
    match cfg.gamma.as_deref() {
        None => Ok(1.0),
        Some([g]) if *g > 0.0 => Ok(*g),
        Some([g]) => Err(UsageError::new("gamma", format!("{g} must be positive"))),
        Some(v) => Err(UsageError::new("gamma", format!("expected 1 value, got {}", v.len()))),
    }
}

fn xs(cfg: &RunConfig) -> Result<&[f64], UsageError> {
    match cfg.x.as_deref() {
        Some(v) if !v.is_empty() => Ok(v),
        _ => Err(UsageError::new("x", "missing; expected at least one value")),
    }
}

fn bulk(cfg: &RunConfig, n: usize) -> BulkParams {
    BulkParams::new(cfg.e(), cfg.j(), n, cfg.omega_f(), cfg.omega_b())
}

/// mu = E + i omega / N for the single fermionic and bosonic argument of c11.
fn c11_args(cfg: &RunConfig, n: usize) -> Result<(Complex64, Complex64), UsageError> {
    let f = cfg.exact("omega-f", &cfg.omega_f, 1)?[0];
    let b = cfg.exact("omega-b", &cfg.omega_b, 1)?[0];
    if b == 0.0 {
        return Err(UsageError::new("omega-b", "must be nonzero (the side of the real axis is ambiguous)"));
    }
    let nn = n as f64;
    Ok((Complex64::new(cfg.e(), f / nn), Complex64::new(cfg.e(), b / nn)))
}

fn check_shape(cfg: &RunConfig, preset: Preset) -> Result<(), UsageError> {
    match preset {
        Preset::C12 => {
            cfg.exact("omega-f", &cfg.omega_f, 1)?;
            if cfg.route == Some(Route::Alt) {
                cfg.exact("omega-b", &cfg.omega_b, 1)?;
            } else {
                cfg.exact("omega-b", &cfg.omega_b, 2)?;
            }
        }
        Preset::C22 => {
            cfg.exact("omega-f", &cfg.omega_f, 2)?;
            cfg.exact("omega-b", &cfg.omega_b, 2)?;
        }
        _ => {}
    }
    if cfg.omega_b().contains(&0.0) && matches!(preset, Preset::C12 | Preset::C22) {
        return Err(UsageError::new("omega-b", "bosonic arguments must be nonzero"));
    }
    Ok(())
}

fn unsupported(command: &str, preset: &str) -> CliError {
    UsageError::new("preset", format!("{command} is not available for preset {preset:?}")).into()
}

/// |MC - reference| against max(3 stderr, tol |reference|).
pub fn mc_verdict(name: &str, m: &McEstimate, reference: Complex64, tol: f64) -> Verdict {
    let (sr, si) = m.stderr_linear();
    let se = sr.hypot(si);
    Verdict::at_most(name, (m.linear() - reference).norm(), (3.0 * se).max(tol * reference.norm()))
}

fn single_row(x: Option<f64>, mc: Option<&McEstimate>, closed: Option<Complex64>, oracle: Option<f64>) -> Table {
    let mut t = Table::new();
    if let Some(x) = x {
        t = t.column("x", vec![x]);
    }
    if let Some(m) = mc {
        t = t.column("mc_mean", vec![m.linear().re]).column("mc_stderr", vec![m.stderr_linear().0]);
    }
    if let Some(c) = closed {
        t = t.column("closed_form", vec![c.re]);
    }
    if let Some(o) = oracle {
        t = t.column("oracle", vec![o]);
    }
    t
}

fn quad_map(name: &str, r: &QuadratureResult<f64>) -> Map<String, Value> {
    let mut m = to_map(r);
    m.insert("method".into(), json!(name));
    m
}

pub fn estimate_cmd_spec(cfg: &RunConfig, spec: &QuantitySpec, name: &str) -> Result<Artifacts, CliError> {
    let samples = cfg.samples.unwrap_or(DEFAULT_SAMPLES);
    let m = mc_estimate(spec, samples, cfg.seed())?;
    let mut extra = extra_for(cfg, name);
    extra.insert("spec".into(), serde_json::to_value(spec).unwrap_or(Value::Null));
    let p = Params {
        e: spec.e,
        j: spec.j,
        n: spec.n,
        omega_f: spec.numerator.iter().map(|f| f.omega).collect(),
        omega_b: spec.denominator.iter().map(|f| f.omega).collect(),
        extra,
    };
    let record = ResultRecord::new(name, p).with_mc(&m);
    let table = single_row(None, Some(&m), None, None);
    Ok(Artifacts::record(record).table("estimate", table))
}

pub fn estimate(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    let name = match &cfg.quantity {
        Some(QuantityChoice::Spec(spec)) => return estimate_cmd_spec(cfg, spec, "custom"),
        _ => cfg.preset()?,
    };
    let preset = Preset::parse(name)?;
    check_shape(cfg, preset)?;
    let n = cfg.n_or(preset.default_n());
    let samples = cfg.samples.unwrap_or(DEFAULT_SAMPLES);
    let seed = cfg.seed();
    let (e, j) = (cfg.e(), cfg.j());
    let mut extra = extra_for(cfg, name);
    let in_bulk = e.abs() < 2.0 * j;

    let spec = match preset {
        Preset::C12 => {
            let b = cfg.omega_b();
            QuantitySpec::c12(e, j, n, cfg.omega_f()[0], [b[0], b[1]])
        }
        Preset::C22 => {
            let (f, b) = (cfg.omega_f(), cfg.omega_b());
            QuantitySpec::c22(e, j, n, [f[0], f[1]], [b[0], b[1]])
        }
        Preset::C11 => {
            let (mf, mb) = c11_args(cfg, n)?;
            QuantitySpec::c11(j, n, mf, mb)
        }
        Preset::SignAvg => QuantitySpec::new(e, j, n).sign_marker(e),
        Preset::Rx => return estimate_rx(cfg, n, extra),
        Preset::KabDensity => return estimate_kab(cfg, n, extra),
        Preset::CurvatureCf | Preset::M2 => return Err(unsupported("estimate", name)),
    };
    extra.insert("spec".into(), serde_json::to_value(&spec).unwrap_or(Value::Null));
    let m = mc_estimate(&spec, samples, seed)?;
    let mut record = ResultRecord::new(name, params(cfg, n, extra)).with_mc(&m);

    let closed = match preset {
        Preset::C12 if in_bulk => Some(c12_bulk(&bulk(cfg, n))?),
        Preset::C22 if in_bulk => Some(c22_bulk(&bulk(cfg, n))?),
        Preset::SignAvg if in_bulk => Some(sign_average(e, n, j)?),
        _ => None,
    };
    if let Some(c) = closed {
        record.companions.closed_form = to_map(&Estimate::from(c));
        if let Some(tol) = cfg.tol {
            record.verdicts.push(mc_verdict("mc_vs_closed_form", &m, c.to_complex(), tol));
        }
    }
    let mut oracle = None;
    if preset == Preset::C11 {
        let (mf, mb) = c11_args(cfg, n)?;
        let v = c11_finite_n(mf, mb, n, j)?;
        record.companions.oracle = to_map(&Estimate::from(v));
        record.verdicts.push(Verdict::at_most("z_score_vs_finite_n", m.z_score(v.to_complex()), cfg.tol.unwrap_or(3.0)));
        oracle = Some(v.to_complex().re);
    }
    let table = single_row(None, Some(&m), closed.map(LogComplex::to_complex), oracle);
    Ok(Artifacts::record(record).table("estimate", table))
}

fn estimate_rx(cfg: &RunConfig, n: usize, extra: Map<String, Value>) -> Result<Artifacts, CliError> {
    let xs = xs(cfg)?;
    let g = gamma(cfg)?;
    let p = KabParams::new(cfg.e(), cfg.j(), n, g);
    let ms = estimate_rx_many(xs, &p, cfg.samples.unwrap_or(DEFAULT_SAMPLES), cfg.seed())?;
    let mut record = ResultRecord::new("rx", params(cfg, n, extra));
    if let [m] = ms.as_slice() {
        record = record.with_mc(m);
    } else {
        record.n_samples = ms.first().map(|m| m.n_samples);
        record.seed = Some(cfg.seed());
    }
    let mut closed = Vec::new();
    if cfg.e() == 0.0 {
        closed = xs.iter().map(|&x| r_characteristic(g * x, cfg.j())).collect::<Result<_, _>>()?;
        record.companions.closed_form = Map::from_iter([("value".to_string(), json!(closed))]);
        if let Some(tol) = cfg.tol {
            for ((x, m), c) in xs.iter().zip(&ms).zip(&closed) {
                record.verdicts.push(mc_verdict(&format!("mc_vs_closed_form_x{x}"), m, Complex64::new(*c, 0.0), tol));
            }
        }
    }
    let mut t = Table::new()
        .column("x", xs.to_vec())
        .column("mc_mean", ms.iter().map(|m| m.linear().re).collect())
        .column("mc_stderr", ms.iter().map(|m| m.stderr_linear().0).collect());
    if !closed.is_empty() {
        t = t.column("closed_form", closed);
    }
    Ok(Artifacts::record(record).table("rx", t))
}

fn estimate_kab(cfg: &RunConfig, n: usize, extra: Map<String, Value>) -> Result<Artifacts, CliError> {
    let g = gamma(cfg)?;
    let samples = cfg.samples.unwrap_or(DEFAULT_SAMPLES);
    let k = sample_kab_many(&KabParams::new(cfg.e(), cfg.j(), n, g), samples, cfg.seed())?;
    let h = empirical_density(&k, 100, (-5.0, 5.0))?;
    let mut record = ResultRecord::new("kab-density", params(cfg, n, extra));
    record.n_samples = Some(samples);
    record.seed = Some(cfg.seed());
    let centers: Vec<f64> = (0..h.bins()).map(|b| h.center(b)).collect();
    let mut t = Table::new()
        .column("k", centers.clone())
        .column("empirical_density", h.density.clone())
        .column("density_stderr", h.density_stderr.clone());
    // the closed form is the E = 0, gamma = 1 perfect-coupling density
    if cfg.e() == 0.0 && g == 1.0 {
        let ks = ks_distance(&k, p_kab_cdf);
        record.companions.closed_form = Map::from_iter([("ks_distance".to_string(), json!(ks))]);
        if let Some(tol) = cfg.tol {
            record.verdicts.push(Verdict::at_most("ks_distance", ks, tol));
        }
        t = t.column("p_kab", centers.iter().map(|&c| p_kab(c)).collect());
    }
    record.params.extra.insert("in_range_fraction".into(), json!(h.in_range_fraction()));
    Ok(Artifacts::record(record).table("density", t))
}

pub fn eval(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    let name = cfg.preset()?;
    let preset = Preset::parse(name)?;
    check_shape(cfg, preset)?;
    let n = cfg.n_or(preset.default_n());
    let (e, j) = (cfg.e(), cfg.j());
    let extra = extra_for(cfg, name);
    let value = match preset {
        Preset::C12 => c12_bulk(&bulk(cfg, n))?,
        Preset::C22 => c22_bulk(&bulk(cfg, n))?,
        Preset::SignAvg => sign_average(e, n, j)?,
        Preset::M2 => {
            let x = cfg.exact("x", &cfg.x, 2)?;
            let g = match &cfg.gamma {
                None => vec![1.0, 1.0],
                some => cfg.exact("gamma", some, 2)?.to_vec(),
            };
            m2_correlation(x[0], x[1], g[0], g[1], e, j, n)?
        }
        Preset::Rx | Preset::CurvatureCf | Preset::KabDensity => {
            let xs = xs(cfg)?;
            let (col, vals): (&str, Vec<Complex64>) = match preset {
                Preset::Rx => {
                    let g = gamma(cfg)?;
                    ("r_characteristic", xs.iter().map(|&x| r_characteristic(g * x, j).map(Complex64::from)).collect::<Result<_, _>>()?)
                }
                Preset::CurvatureCf => ("curvature_cf", xs.iter().map(|&w| curvature_cf(w, e, j)).collect::<Result<_, _>>()?),
                _ => ("p_kab", xs.iter().map(|&k| Complex64::from(p_kab(k))).collect()),
            };
            let mut record = ResultRecord::new(name, params(cfg, n, extra));
            if let [v] = vals.as_slice() {
                record.estimate = Some(LogComplex::from_complex(*v).into());
            }
            record.companions.closed_form = Map::from_iter([
                ("value_re".to_string(), json!(vals.iter().map(|v| v.re).collect::<Vec<_>>())),
                ("value_im".to_string(), json!(vals.iter().map(|v| v.im).collect::<Vec<_>>())),
            ]);
            let mut t = Table::new().column("x", xs.to_vec()).column(col, vals.iter().map(|v| v.re).collect());
            if vals.iter().any(|v| v.im != 0.0) {
                t = t.column(&format!("{col}_im"), vals.iter().map(|v| v.im).collect());
            }
            return Ok(Artifacts::record(record).table(col, t));
        }
        Preset::C11 => return Err(unsupported("eval", name)),
    };
    let mut record = ResultRecord::new(name, params(cfg, n, extra));
    record.estimate = Some(value.into());
    record.companions.closed_form = to_map(&Estimate::from(value));
    let table = single_row(None, None, Some(value.to_complex()), None);
    Ok(Artifacts::record(record).table("eval", table))
}

pub fn oracle(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    let name = cfg.preset()?;
    let preset = Preset::parse(name)?;
    check_shape(cfg, preset)?;
    let n = cfg.n_or(preset.default_n());
    let (e, j) = (cfg.e(), cfg.j());
    let mut extra = extra_for(cfg, name);
    let needs_zero_e = || {
        if e != 0.0 {
            Err(UsageError::new("E", format!("{e}: integral oracles are implemented at E = 0 only")))
        } else {
            Ok(())
        }
    };
    let quad = match preset {
        Preset::C12 => {
            needs_zero_e()?;
            let (f, b) = (cfg.omega_f()[0], cfg.omega_b());
            match cfg.route.unwrap_or(Route::Exact) {
                Route::Exact => {
                    extra.insert("route".into(), json!("exact"));
                    vec![("c12_exact_integral", c12_exact_integral(f, b[0], b[1], n, j)?)]
                }
                Route::Alt => {
                    extra.insert("route".into(), json!("alt"));
                    vec![("c12_alt_integral", c12_alt_integral(f, b[0], n, j)?)]
                }
            }
        }
        Preset::C22 => {
            needs_zero_e()?;
            let (f, b) = (cfg.omega_f(), cfg.omega_b());
            vec![("c22_exact_integral", c22_exact_integral(f[0], f[1], b[0], b[1], n, j)?)]
        }
        Preset::Rx => {
            let g = gamma(cfg)?;
            xs(cfg)?.iter().map(|&x| Ok(("rx_integral", rx_integral(g * x, j)?))).collect::<Result<_, CliError>>()?
        }
        Preset::KabDensity => {
            xs(cfg)?.iter().map(|&k| Ok(("brouwer_marginal", brouwer_marginal(k)?))).collect::<Result<_, CliError>>()?
        }
        Preset::C11 => {
            let (mf, mb) = c11_args(cfg, n)?;
            let v = c11_finite_n(mf, mb, n, j)?;
            let mut record = ResultRecord::new(name, params(cfg, n, extra));
            record.estimate = Some(v.into());
            record.companions.oracle = to_map(&Estimate::from(v));
            record.companions.oracle.insert("method".into(), json!("c11_finite_n"));
            let t = single_row(None, None, None, Some(v.to_complex().re));
            return Ok(Artifacts::record(record).table("oracle", t));
        }
        Preset::SignAvg | Preset::CurvatureCf | Preset::M2 => return Err(unsupported("oracle", name)),
    };
    let mut record = ResultRecord::new(name, params(cfg, n, extra));
    let proportional = matches!(preset, Preset::C12 | Preset::C22 | Preset::Rx);
    if let [(method, r)] = quad.as_slice() {
        record.estimate = Some(LogComplex::from_real(r.value).into());
        record.companions.oracle = quad_map(method, r);
    } else {
        record.companions.oracle = Map::from_iter([
            ("method".to_string(), json!(quad[0].0)),
            ("value".to_string(), json!(quad.iter().map(|q| q.1.value).collect::<Vec<_>>())),
            ("abs_error".to_string(), json!(quad.iter().map(|q| q.1.abs_error).collect::<Vec<_>>())),
            ("converged".to_string(), json!(quad.iter().map(|q| q.1.converged).collect::<Vec<_>>())),
        ]);
    }
    record.companions.oracle.insert("normalization".into(), json!(if proportional { "up to one constant" } else { "absolute" }));
    let worst = quad.iter().map(|q| q.1.abs_error / q.1.value.abs().max(f64::MIN_POSITIVE)).fold(0.0, f64::max);
    let converged = quad.iter().all(|q| q.1.converged);
    record.verdicts.push(Verdict::at_least("quadrature_converged", if converged { 1.0 } else { 0.0 }, 1.0));
    if let Some(tol) = cfg.tol {
        record.verdicts.push(Verdict::at_most("quadrature_relative_error", worst, tol));
    }
    let mut t = Table::new();
    if let Some(x) = &cfg.x {
        if x.len() == quad.len() {
            t = t.column("x", x.clone());
        }
    }
    t = t.column("oracle", quad.iter().map(|q| q.1.value).collect());
    Ok(Artifacts::record(record).table("oracle", t))
}

pub fn sample_spectra(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    let n = cfg.n_or(80);
    let j = cfg.j();
    let samples = cfg.samples.unwrap_or(10);
    let seed = cfg.seed();
    let spectra = (0..samples).map(|i| sample_spectrum(n, j, seed, i)).collect::<Result<Vec<_>, _>>()?;
    let mut record = ResultRecord::new("spectra", params(cfg, n, extra_for(cfg, "spectra")));
    record.n_samples = Some(samples);
    record.seed = Some(seed);
    let mut t = Table::new().column("sample", (0..samples).map(|i| i as f64).collect());
    for k in 0..n {
        t = t.column(&format!("lambda_{}", k + 1), spectra.iter().map(|s| s[k]).collect());
    }
    Ok(Artifacts::record(record).table("spectra", t))
}
