//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. Pass criterion ids (e.g. `5 9`) as
//! arguments to run a subset.

use std::f64::consts::PI;
use std::time::Instant;

use goe_charpoly::asymptotics::{
    c12_bulk, c22_bulk, curvature_cf, curvature_pdf, p_kab, p_kab_cdf, r_characteristic, sign_average, BulkParams,
    Calibration,
};
use goe_charpoly::estimators::{
    empirical_cf, estimate_many, estimate_rx_many, ks_distance, sample_kab_many, with_workers, KabParams, McEstimate,
    QuantitySpec,
};
use goe_charpoly::linalg::Side;
use goe_charpoly::oracles::{
    brouwer_fourier_check, brouwer_marginal, c11_finite_n, c12_alt_closed, c12_alt_integral, c12_exact_integral,
    c22_exact_integral, fyokeat_rhs, rx_integral, rx_reference,
};
use goe_charpoly::quadrature::{integrate, Domain, QuadOptions};
use goe_charpoly::specfun::{
    bessel_i0, bessel_i1, bessel_k0, bessel_k1, cauchy_f, hermite_he, k0_tail,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_140_601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

// ---- Monte Carlo runs, shared with the determinism check ----

fn figure1_omegas() -> Vec<f64> {
    linspace(0.05, 3.0, 60)
}

fn figure1_mc() -> Vec<McEstimate> {
    let specs: Vec<QuantitySpec> = figure1_omegas()
        .iter()
        .map(|&w| QuantitySpec::new(0.0, 1.0, 80).halfdet(w, Side::Plus).halfdet(-w, Side::Minus))
        .collect();
    estimate_many(&specs, 40_000, SEED).unwrap()
}

fn kab_params() -> KabParams {
    KabParams::new(0.0, 1.0, 80, 1.0)
}

fn kab_samples() -> Vec<f64> {
    sample_kab_many(&kab_params(), 40_000, SEED + 1).unwrap()
}

fn rx_grid() -> Vec<f64> {
    linspace(0.0, 4.0, 17)
}

fn rx_mc() -> Vec<McEstimate> {
    estimate_rx_many(&rx_grid(), &kab_params(), 40_000, SEED + 2).unwrap()
}

fn c11_points() -> Vec<(Complex64, Complex64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    (0..5)
        .map(|_| {
            let mu_f = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let mu_b = Complex64::new(rng.random_range(-1.0..1.0), sign * rng.random_range(0.3..1.5));
            (mu_f, mu_b)
        })
        .collect()
}

fn c11_mc() -> Vec<McEstimate> {
    c11_points()
        .iter()
        .enumerate()
        .map(|(k, &(f, b))| estimate_many(&[QuantitySpec::c11(1.0, 4, f, b)], 1_000_000, SEED + 10 + k as u64).unwrap()[0])
        .collect()
}

const DELTAS: [f64; 3] = [0.5, 1.0, 2.0];

fn fyokeat_mc() -> Vec<McEstimate> {
    let specs: Vec<QuantitySpec> = DELTAS
        .iter()
        .map(|&d| QuantitySpec::new(0.0, 1.0, 80).inv_halfdet(d, Side::Plus).inv_halfdet(-d, Side::Minus))
        .collect();
    estimate_many(&specs, 40_000, SEED + 4).unwrap()
}

/// Sign averages at E = 0.5 and E = 0 for N = 20 and N = 21.
fn parity_mc() -> Vec<McEstimate> {
    let mut out = Vec::new();
    for n in [20usize, 21] {
        let specs = [
            QuantitySpec::new(0.5, 1.0, n).sign_marker(0.5),
            QuantitySpec::new(0.0, 1.0, n).sign_marker(0.0),
        ];
        out.extend(estimate_many(&specs, 200_000, SEED + 5 + n as u64).unwrap());
    }
    out
}

struct McRuns {
    figure1: Vec<McEstimate>,
    kab: Vec<f64>,
    rx: Vec<McEstimate>,
    c11: Vec<McEstimate>,
    fyokeat: Vec<McEstimate>,
    parity: Vec<McEstimate>,
}

fn mc_runs() -> McRuns {
    McRuns {
        figure1: figure1_mc(),
        kab: kab_samples(),
        rx: rx_mc(),
        c11: c11_mc(),
        fyokeat: fyokeat_mc(),
        parity: parity_mc(),
    }
}

fn fingerprint(r: &McRuns) -> Vec<u64> {
    let mut v = Vec::new();
    let mut est = |e: &McEstimate| {
        v.extend([e.mean.re, e.mean.im, e.stderr_re, e.stderr_im, e.shift].map(f64::to_bits));
        v.push(e.n_used);
    };
    for e in r.figure1.iter().chain(&r.rx).chain(&r.c11).chain(&r.fyokeat).chain(&r.parity) {
        est(e);
    }
    v.extend(r.kab.iter().map(|k| k.to_bits()));
    v
}

// ---- criteria ----

fn criterion_1(runs: &McRuns) -> Outcome {
    let mut passed = 0;
    let mut worst = (0.0, 0.0f64);
    for (&w, m) in figure1_omegas().iter().zip(&runs.figure1) {
        let cf = c22_bulk(&BulkParams::new(0.0, 1.0, 80, &[w, -w], &[w, -w])).unwrap().to_complex().re;
        let mc = m.linear().re;
        let se = m.stderr_linear().0;
        let tol = (3.0 * se).max(0.05 * cf.abs());
        if (mc - cf).abs() <= tol {
            passed += 1;
        }
        let dev = (mc / cf - 1.0).abs();
        if dev > worst.1 {
            worst = (w, dev);
        }
    }
    outcome(
        passed >= 57,
        format!(
            "{passed}/60 points within max(3 stderr, 5%) (need 57); largest |MC/closed - 1| = {:.4} at omega = {:.3}",
            worst.1, worst.0
        ),
    )
}

fn criterion_2(runs: &McRuns) -> Outcome {
    let ks = ks_distance(&runs.kab, p_kab_cdf);
    let xs = rx_grid();
    let cf = empirical_cf(&runs.kab, &xs).unwrap();
    let mut cf_fail = Vec::new();
    let mut mc_fail = Vec::new();
    for ((&x, c), m) in xs.iter().zip(&cf).zip(&runs.rx) {
        let r = r_characteristic(x, 1.0).unwrap();
        if (c.mean - r).abs() > (3.0 * c.stderr).max(0.03 * r) {
            cf_fail.push(format!("{x}: {:.5} vs {r:.5}", c.mean));
        }
        let v = m.linear().re;
        if (v - r).abs() > (3.0 * m.stderr_linear().0).max(0.03 * r) {
            mc_fail.push(format!("{x}: {:+.2}%", 100.0 * (v / r - 1.0)));
        }
    }
    let pass_a = ks <= 0.015;
    let pass_b = cf_fail.is_empty() && mc_fail.is_empty();
    outcome(
        pass_a && pass_b,
        format!(
            "(a) KS = {ks:.4} (<= 0.015) {}; (b) empirical cf {} [{}], direct MC {} [{}]",
            if pass_a { "ok" } else { "FAIL" },
            if cf_fail.is_empty() { "ok" } else { "FAIL" },
            cf_fail.join(", "),
            if mc_fail.is_empty() { "ok" } else { "FAIL" },
            mc_fail.join(", ")
        ),
    )
}

fn criterion_3() -> Outcome {
    let r0 = r_characteristic(0.0, 1.0).unwrap();
    let opts = QuadOptions::new(0.0, 1e-12);
    let pk = integrate(p_kab, Domain::full_line(0.0, 1.0), &opts).value;
    let cp = integrate(curvature_pdf, Domain::full_line(0.0, 1.0), &opts).value;
    let pass = (r0 - 1.0).abs() <= 1e-12 && (pk - 1.0).abs() <= 1e-8 && (cp - 1.0).abs() <= 1e-8 && curvature_pdf(0.0) == 1.0;
    outcome(
        pass,
        format!(
            "R(0) - 1 = {:.1e}; int p_kab - 1 = {:.1e}; int pdf - 1 = {:.1e}; pdf(0) = {}",
            r0 - 1.0,
            pk - 1.0,
            cp - 1.0,
            curvature_pdf(0.0)
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut worst = 0.0f64;
    for c in linspace(-3.0, 3.0, 61) {
        let pts = linspace(0.0, 160.0, 81);
        let r = integrate(
            |w: f64| curvature_cf(w, 0.0, 1.0).unwrap().re * (w * c).cos(),
            Domain::piecewise(&pts),
            &QuadOptions::new(1e-14, 1e-12),
        );
        worst = worst.max((r.value / PI - curvature_pdf(c)).abs());
    }
    outcome(worst <= 1e-6, format!("max |FT(cf) - pdf| on 61 points of [-3, 3] = {worst:.2e} (<= 1e-6)"))
}

fn criterion_5(runs: &McRuns) -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    let mut mark = |name: &str, ok: bool, detail: String| {
        pass &= ok;
        parts.push(format!("({name}) {} {detail}", if ok { "ok" } else { "FAIL" }));
    };

    let xs = [0.25, 0.5, 1.0, 2.0, 3.0];
    let rx: Vec<f64> = xs.iter().map(|&x| rx_integral(x, 1.0).unwrap().value).collect();
    let rr: Vec<f64> = xs.iter().map(|&x| rx_reference(x, 1.0).unwrap()).collect();
    let cal = Calibration::fit_real(&rx, &rr).unwrap();
    mark("a", cal.max_deviation <= 1e-4, format!("max dev {:.1e}", cal.max_deviation));

    let wfs = [0.0, 0.5, 1.0];
    let alt: Vec<f64> = wfs.iter().map(|&w| c12_alt_integral(w, 1.0, 7, 1.0).unwrap().value).collect();
    let closed: Vec<f64> = wfs.iter().map(|&w| c12_alt_closed(w, 1.0, 7, 1.0).unwrap()).collect();
    let cal = Calibration::fit_real(&alt, &closed).unwrap();
    mark("b", cal.max_deviation <= 1e-6, format!("max dev {:.1e}", cal.max_deviation));

    let ex: Vec<Complex64> = wfs
        .iter()
        .map(|&w| Complex64::new(c12_exact_integral(w, 1.0, -1.0, 16, 1.0).unwrap().value, 0.0))
        .collect();
    let bulk: Vec<Complex64> = wfs
        .iter()
        .map(|&w| c12_bulk(&BulkParams::new(0.0, 1.0, 16, &[w], &[1.0, -1.0])).unwrap().to_complex())
        .collect();
    let cal = Calibration::fit(&ex, &bulk).unwrap();
    mark("c", cal.spread <= 0.02, format!("cv {:.4}", cal.spread));

    let f1s = [0.2, 0.6, 1.0];
    let ex: Vec<Complex64> = f1s
        .iter()
        .map(|&f| Complex64::new(c22_exact_integral(f, 0.0, 1.0, -1.0, 12, 1.0).unwrap().value, 0.0))
        .collect();
    let bulk: Vec<Complex64> = f1s
        .iter()
        .map(|&f| c22_bulk(&BulkParams::new(0.0, 1.0, 12, &[f, 0.0], &[1.0, -1.0])).unwrap().to_complex())
        .collect();
    let cal = Calibration::fit(&ex, &bulk).unwrap();
    mark("d", cal.max_deviation <= 0.05, format!("max dev {:.4}", cal.max_deviation));

    let zs: Vec<f64> = c11_points()
        .iter()
        .zip(&runs.c11)
        .map(|(&(f, b), m)| m.z_score(c11_finite_n(f, b, 4, 1.0).unwrap().to_complex()))
        .collect();
    let zmax = zs.iter().copied().fold(0.0, f64::max);
    mark("e", zmax <= 3.0, format!("max z {zmax:.2}"));

    // ratio MC / rhs with its standard error, tested against the weighted mean ratio
    let ratios: Vec<(f64, f64)> = DELTAS
        .iter()
        .zip(&runs.fyokeat)
        .map(|(&d, m)| {
            let rhs = fyokeat_rhs(1, d).unwrap().value;
            (m.linear().re / rhs, m.stderr_linear().0 / rhs)
        })
        .collect();
    let wsum: f64 = ratios.iter().map(|(_, s)| 1.0 / (s * s)).sum();
    let mean = ratios.iter().map(|(r, s)| r / (s * s)).sum::<f64>() / wsum;
    let zf = ratios.iter().map(|(r, s)| (r - mean).abs() / s).fold(0.0, f64::max);
    let shown: Vec<String> = ratios.iter().map(|(r, s)| format!("{r:.4e}+-{s:.1e}")).collect();
    mark("f", zf <= 3.0, format!("max z {zf:.1} ratios [{}]", shown.join(", ")));

    outcome(pass, parts.join("; "))
}

fn criterion_6(runs: &McRuns) -> Outcome {
    let p = &runs.parity;
    // p = [N20 E0.5, N20 E0, N21 E0.5, N21 E0]
    let z20 = p[0].z_score(sign_average(0.5, 20, 1.0).unwrap().to_complex());
    let z21 = p[2].z_score(sign_average(0.5, 21, 1.0).unwrap().to_complex());
    let z_odd = p[3].z_score(Complex64::new(0.0, 0.0));
    let z_even = p[1].z_score(Complex64::new(1.0 / (20.0 * PI).sqrt(), 0.0));
    let pass = [z20, z21, z_odd, z_even].iter().all(|&z| z <= 3.0);
    outcome(
        pass,
        format!(
            "E=0.5: z(N=20) = {z20:.2}, z(N=21) = {z21:.2}; E=0: z(N=21 vs 0) = {z_odd:.2}, z(N=20 vs 1/sqrt(20 pi)) = {z_even:.2}"
        ),
    )
}

fn he_integral(n: usize, z: Complex64) -> Complex64 {
    // (2 pi)^{-1/2} int (z + i t)^n e^{-t^2/2} dt
    let i = Complex64::new(0.0, 1.0);
    let r = integrate(
        |t: f64| (z + i * t).powu(n as u32) * (-0.5 * t * t).exp(),
        Domain::full_line(0.0, 1.0 + (n as f64).sqrt()),
        &QuadOptions::new(0.0, 1e-15),
    );
    r.value / (2.0 * PI).sqrt()
}

fn f_real_axis(n: u32, z: Complex64) -> Complex64 {
    // (i s)^n int_0^inf t^n exp(-t^2/2 - i s z t) dt
    let s = z.im.signum();
    let a = Complex64::new(0.0, s) * z;
    let peak = (-a.re + (a.re * a.re + 4.0 * n as f64).sqrt()) / 2.0;
    let top = peak + 12.0 + (n as f64).sqrt();
    let pts = linspace(0.0, top, 40);
    let r = integrate(
        |t: f64| (-0.5 * t * t - a * t).exp() * t.powi(n as i32),
        Domain::piecewise(&pts),
        &QuadOptions::new(0.0, 1e-14),
    );
    Complex64::new(0.0, s).powu(n) * r.value
}

fn criterion_7() -> Outcome {
    let mut he = 0.0f64;
    for z in [Complex64::new(0.7, 0.4), Complex64::new(-1.5, 0.8), Complex64::new(2.5, -1.0), Complex64::new(0.1, 3.0)] {
        for n in 0..=30 {
            let h = hermite_he(n, z);
            he = he.max((h - he_integral(n, z)).norm() / h.norm());
        }
    }
    let mut ff = 0.0f64;
    for z in [Complex64::new(0.5, 1.0), Complex64::new(-1.0, 2.0), Complex64::new(1.5, -0.5), Complex64::new(-0.3, -3.0)] {
        for n in 0..=50 {
            let f = cauchy_f(n, z).unwrap();
            ff = ff.max((f - f_real_axis(n, z)).norm() / f.norm());
        }
    }
    let mut wr = 0.0f64;
    for x in linspace(0.05, 30.0, 120) {
        let w = bessel_i0(x) * bessel_k1(x).unwrap() + bessel_i1(x) * bessel_k0(x).unwrap();
        wr = wr.max((x * w - 1.0).abs());
    }
    let mut dd = 0.0f64;
    let g = |x: f64| x * bessel_k0(x).unwrap() + k0_tail(x).unwrap();
    for x in linspace(0.2, 8.0, 40) {
        let h = 1e-4;
        let d = (g(x + h) - g(x - h)) / (2.0 * h);
        dd = dd.max((d + x * bessel_k1(x).unwrap()).abs());
    }
    let pass = he <= 1e-10 && ff <= 1e-8 && wr <= 1e-11 && dd <= 1e-7;
    outcome(
        pass,
        format!("Hermite {he:.1e} (1e-10); F_n {ff:.1e} (1e-8); Wronskian {wr:.1e} (1e-11); d/dx[xK0+tail]+xK1 {dd:.1e} (1e-7)"),
    )
}

fn criterion_8() -> Outcome {
    let mut worst = 0.0f64;
    for k in [0.0, 0.5, 1.0, 2.0] {
        worst = worst.max((brouwer_marginal(k).unwrap().value - p_kab(k)).abs());
    }
    let xs = [0.5, 1.0, 2.0];
    let got: Vec<f64> = xs.iter().map(|&x| brouwer_fourier_check(x).unwrap().value).collect();
    let want: Vec<f64> = xs.iter().map(|&x| rx_reference(x, 1.0).unwrap()).collect();
    let cal = Calibration::fit_real(&got, &want).unwrap();
    outcome(
        worst <= 1e-6 && cal.max_deviation <= 1e-4,
        format!(
            "marginal vs p_kab {worst:.1e} (1e-6); Fourier ratio dev {:.1e} (1e-4), constant {:.6}",
            cal.max_deviation, cal.constant.re
        ),
    )
}

fn criterion_9(one: &McRuns) -> Outcome {
    let eight = with_workers(8, mc_runs).unwrap();
    let same = fingerprint(one) == fingerprint(&eight);
    outcome(same, format!("MC outputs of criteria 1, 2, 5e, 5f, 6 bit-identical under 1 and 8 workers: {same}"))
}

fn main() {
    let wanted: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let run = |id: &str| wanted.is_empty() || wanted.iter().any(|w| w == id);
    let needs_mc = ["1", "2", "5", "6", "9"].iter().any(|id| run(id));
    let start = Instant::now();
    let runs = needs_mc.then(|| with_workers(1, mc_runs).unwrap());
    let mut failed = 0;
    let mut report = |id: &str, name: &str, f: &dyn Fn() -> Outcome| {
        if !run(id) {
            return;
        }
        let t = Instant::now();
        let o = f();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} criterion {id} ({name}): {}  [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            t.elapsed().as_secs_f64()
        );
    };
    let mc = || runs.as_ref().unwrap();
    report("1", "Figure 1", &|| criterion_1(mc()));
    report("2", "Figure 2", &|| criterion_2(mc()));
    report("3", "normalizations", &criterion_3);
    report("4", "curvature Fourier pair", &criterion_4);
    report("5", "oracle triangle", &|| criterion_5(mc()));
    report("6", "parity effect", &|| criterion_6(mc()));
    report("7", "special functions", &criterion_7);
    report("8", "appendices", &criterion_8);
    report("9", "determinism", &|| criterion_9(mc()));
    println!("acceptance: {failed} failing criteria, {:.0}s total", start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
