use goe_charpoly::asymptotics::{c12_bulk, BulkParams};
use goe_charpoly::estimators::{estimate_many, sample_spectrum, QuantitySpec};
use goe_charpoly::oracles::two_charpoly_asymp;
use num_complex::Complex64;

/// Largest |m - c o| / se after a weighted fit of the single constant c.
fn ratio_z(m: &[f64], se: &[f64], o: &[f64]) -> f64 {
    let num: f64 = m.iter().zip(se).zip(o).map(|((m, s), o)| m * o / (s * s)).sum();
    let den: f64 = se.iter().zip(o).map(|(s, o)| o * o / (s * s)).sum();
    let c = num / den;
    m.iter().zip(se).zip(o).map(|((m, s), o)| (m - c * o).abs() / s).fold(0.0, f64::max)
}

#[test]
fn two_determinant_average_follows_kernel_shape() {
    // matrix shifts +-i d / 2N at E = 0 (pi rho = 1) pair with the real
    // kernel arguments xi1 - xi2 = d
    let (n, samples) = (60usize, 100_000u64);
    let ds = [0.5, 1.0, 2.0];
    let shape: Vec<f64> = ds
        .iter()
        .map(|&d| two_charpoly_asymp(Complex64::new(0.5 * d, 0.0), Complex64::new(-0.5 * d, 0.0), 1.0).re)
        .collect();

    // per-spectrum log |det(i d / 2N - H)|^2 at every d, from the same draws
    let logs: Vec<[f64; 3]> = (0..samples)
        .map(|i| {
            let lambda = sample_spectrum(n, 1.0, 41, i).unwrap();
            ds.map(|d| {
                let c = (0.5 * d / n as f64).powi(2);
                lambda.iter().map(|l| (l * l + c).ln()).sum()
            })
        })
        .collect();
    let shift = logs.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
    let x: Vec<[f64; 3]> = logs.iter().map(|l| l.map(|v| (v - shift).exp())).collect();
    let nn = samples as f64;
    let mean: Vec<f64> = (0..3).map(|k| x.iter().map(|v| v[k]).sum::<f64>() / nn).collect();
    let se: Vec<f64> = (0..3)
        .map(|k| (x.iter().map(|v| (v[k] - mean[k]).powi(2)).sum::<f64>() / (nn - 1.0) / nn).sqrt())
        .collect();

    // the plain three-stderr contract on the means
    let z = ratio_z(&mean, &se, &shape);
    assert!(z <= 3.0, "max z {z}, mc {mean:?}, shape {shape:?}");

    // paired ratios to d = 1, delta-method errors
    for k in [0, 2] {
        let r = mean[k] / mean[1];
        let var = x
            .iter()
            .map(|v| (v[k] / mean[1] - r * v[1] / mean[1]).powi(2))
            .sum::<f64>()
            / (nn - 1.0)
            / nn;
        let want = shape[k] / shape[1];
        let zr = (r - want).abs() / var.sqrt();
        assert!(zr <= 3.0, "d = {}: ratio {r} vs {want}, z {zr}", ds[k]);
        // a flat shape is excluded
        assert!((r - 1.0).abs() / var.sqrt() > 5.0, "d = {}: ratio {r} not resolved", ds[k]);
    }
}

#[test]
fn equal_sign_c12_matches_exponential_form() {
    let wf = [0.25, 0.5, 1.5, 2.0];
    let specs: Vec<QuantitySpec> = wf.iter().map(|&w| QuantitySpec::c12(0.4, 1.0, 60, w, [1.0, 1.0])).collect();
    let mc = estimate_many(&specs, 40_000, 43).unwrap();
    for (&w, m) in wf.iter().zip(&mc) {
        let cf = c12_bulk(&BulkParams::new(0.4, 1.0, 60, &[w], &[1.0, 1.0])).unwrap().to_complex();
        let (sr, si) = m.stderr_linear();
        let tol = (3.0 * sr.hypot(si)).max(0.05 * cf.norm());
        assert!((m.linear() - cf).norm() <= tol, "omega_f = {w}: mc {} vs {cf}", m.linear());
    }
}
