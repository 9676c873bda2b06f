//! Property checks shared by the `properties` test target and the
//! acceptance suite, which times the whole set.

#![allow(dead_code)]

use std::f64::consts::PI;

use photon_fluid::fitting::{find_peaks, fit_gaussian, fit_two_gaussian, fit_power_law, GaussianModel, TwoGaussianFit};
use photon_fluid::io::csv::format_float;
use photon_fluid::io::snapshot::{read_snapshot, write_snapshot};
use photon_fluid::ssfm::nonlinear_step;
use photon_fluid::*;
use std::result::Result;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

pub const LAMBDA0: f64 = 780e-9;

pub type Check = fn() -> Result<(), String>;

fn run<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String> {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

fn complex_vec(n: impl Strategy<Value = usize>) -> impl Strategy<Value = Vec<Complex64>> {
    n.prop_flat_map(|n| prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), n))
        .prop_map(|v| v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
}

pub fn fft_round_trip() -> Result<(), String> {
    run(128, (complex_vec(2usize..400), 1e-4..1.0f64), |(samples, width)| {
        let g = Grid::new(samples.len(), width).unwrap();
        let mut buf = samples.clone();
        g.forward(&mut buf);
        g.inverse(&mut buf);
        let scale = samples.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (a, b) in buf.iter().zip(&samples) {
            prop_assert!((a - b).norm() <= 1e-12 * scale);
        }
        Ok(())
    })
}

/// Multiplying the spectrum by `exp(-i·k·a)` shifts the field by `+a`.
pub fn spectral_ramp_translates() -> Result<(), String> {
    run(64, (complex_vec(4usize..200), 0usize..1000), |(samples, shift)| {
        let n = samples.len();
        let m = shift % n;
        let g = make_grid(n, 1e-3).unwrap();
        let a = m as f64 * g.dx();
        let f = ComplexField::new(g.clone(), samples.clone(), 0.0).unwrap();
        let spec: Vec<Complex64> = f
            .spectrum()
            .iter()
            .zip(g.wavenumbers())
            .map(|(v, &k)| v * Complex64::from_polar(1.0, -k * a))
            .collect();
        let moved = ComplexField::from_spectrum(g.clone(), spec, 0.0).unwrap();
        let scale = samples.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for j in 0..n {
            let expected = samples[(j + n - m) % n];
            prop_assert!((moved.samples()[j] - expected).norm() <= 1e-10 * scale.max(1e-300));
        }
        Ok(())
    })
}

pub fn madelung_recomposes() -> Result<(), String> {
    let lobes = prop::collection::vec((0.1..5.0f64, -2e-3..2e-3f64, 5e-5..5e-4f64, -3e4..3e4f64), 1..4);
    run(64, lobes, |lobes| {
        let g = make_grid(1024, 8e-3).unwrap();
        let f = ComplexField::from_fn(g, |x| {
            lobes
                .iter()
                .map(|&(a, c, w, k)| Complex64::from_polar(a * (-((x - c) / w).powi(2)).exp(), k * x))
                .sum()
        })
        .unwrap();
        let m = madelung_decompose(&f, 2.0 * PI / LAMBDA0);
        let rec = m.recompose();
        let max_rho = m.density.iter().copied().fold(0.0, f64::max);
        for (j, (r, e)) in rec.iter().zip(f.samples()).enumerate() {
            if m.density[j] > 1e-6 * max_rho {
                prop_assert!((r - e).norm() <= 1e-10 * e.norm());
            }
        }
        Ok(())
    })
}

/// With `α = 0` both half-steps are unitary.
pub fn power_is_conserved() -> Result<(), String> {
    let case = (complex_vec(Just(128usize)), -1e-10..1e-10f64, 1e-3..0.1f64);
    run(16, case, |(samples, n2, z)| {
        let g = make_grid(128, 2e-3).unwrap();
        let f = ComplexField::new(g, samples.iter().map(|v| v * 100.0).collect(), 0.0).unwrap();
        let medium = MediumSpec::new(LAMBDA0, n2, 0.0, z).unwrap();
        let out = propagate(&f, &medium, &PropagationPlan::new(z, 1000).unwrap()).unwrap();
        let (p0, p1) = (total_power(&f), total_power(&out.final_field));
        prop_assert!(((p1 - p0) / p0).abs() < 1e-10, "drift {}", (p1 - p0) / p0);
        Ok(())
    })
}

pub fn nonlinear_step_keeps_modulus() -> Result<(), String> {
    run(64, (complex_vec(2usize..100), -1e-9..1e-9f64, 0.0..0.1f64), |(samples, n2, dz)| {
        let g = make_grid(samples.len(), 1e-3).unwrap();
        let f = ComplexField::new(g, samples, 0.0).unwrap();
        let medium = MediumSpec::new(LAMBDA0, n2, 0.0, 1.0).unwrap();
        let out = nonlinear_step(&f, &medium, dz);
        for (a, b) in out.samples().iter().zip(f.samples()) {
            prop_assert!((a.norm() - b.norm()).abs() <= 1e-12 * b.norm().max(1.0));
        }
        Ok(())
    })
}

fn sample_gaussian(model: &GaussianModel, xs: &[f64]) -> Vec<f64> {
    xs.iter().map(|&x| model.eval(x)).collect()
}

/// Translating and scaling `x` maps the fitted centre and width covariantly.
pub fn gaussian_fit_is_covariant() -> Result<(), String> {
    let case = (0.5..2.0f64, -100e-6..100e-6f64, 60e-6..150e-6f64, 0.0..0.2f64, -1e-3..1e-3f64, 0.5..3.0f64);
    run(48, case, |(a, c, w, b, shift, scale)| {
        let xs: Vec<f64> = (0..400).map(|i| (i as f64 - 200.0) * 2.5e-6).collect();
        let truth = GaussianModel::new(a, c, w, b);
        let ys = sample_gaussian(&truth, &xs);
        let init = GaussianModel::new(0.8 * a, c + 20e-6, 1.2 * w, 0.0);
        let fit = fit_gaussian(&xs, &ys, &init).map_err(|e| TestCaseError::fail(e.to_string()))?;

        let moved: Vec<f64> = xs.iter().map(|x| scale * x + shift).collect();
        let init_moved = GaussianModel::new(init.amplitude, scale * init.center + shift, scale * init.width, 0.0);
        let fit_moved = fit_gaussian(&moved, &ys, &init_moved).map_err(|e| TestCaseError::fail(e.to_string()))?;

        prop_assert!((fit_moved.center - (scale * fit.center + shift)).abs() < 1e-9 * scale.max(1.0));
        prop_assert!((fit_moved.width - scale * fit.width).abs() < 1e-9 * scale);
        prop_assert!((fit_moved.amplitude - fit.amplitude).abs() < 1e-8);
        // noiseless data: the residual vanishes
        let max_y = ys.iter().copied().fold(0.0, f64::max);
        let rms = (xs.iter().zip(&ys).map(|(&x, &y)| (fit.eval(x) - y).powi(2)).sum::<f64>() / xs.len() as f64).sqrt();
        prop_assert!(rms < 1e-8 * max_y, "rms {rms}");
        Ok(())
    })
}

pub fn two_gaussian_separation_scales() -> Result<(), String> {
    let case = (150e-6..400e-6f64, 70e-6..100e-6f64, 0.5..1.5f64, 0.5..2.0f64);
    run(32, case, |(half, w, ratio, scale)| {
        let xs: Vec<f64> = (0..800).map(|i| (i as f64 - 400.0) * 2e-6).collect();
        let a = GaussianModel::new(1.0, -half, w, 0.0);
        let b = GaussianModel::new(ratio, half, w, 0.0);
        let ys: Vec<f64> = xs.iter().map(|&x| a.eval(x) + b.eval(x)).collect();
        let init = TwoGaussianFit::initial((-0.9 * half, 1.0), (0.9 * half, ratio), 1.1 * w, 0.0);
        let fit = fit_two_gaussian(&xs, &ys, &init).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let xs2: Vec<f64> = xs.iter().map(|x| scale * x).collect();
        let init2 = TwoGaussianFit::initial((-0.9 * half * scale, 1.0), (0.9 * half * scale, ratio), 1.1 * w * scale, 0.0);
        let fit2 = fit_two_gaussian(&xs2, &ys, &init2).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(!fit.degenerate && !fit2.degenerate);
        prop_assert!((fit.separation - 2.0 * half).abs() < 1e-9);
        prop_assert!((fit2.separation - scale * fit.separation).abs() < 1e-9 * scale);
        Ok(())
    })
}

pub fn peaks_mirror() -> Result<(), String> {
    let lobes = prop::collection::vec((0.2..1.0f64, -1e-3..1e-3f64, 30e-6..120e-6f64), 1..4);
    run(64, lobes, |lobes| {
        // symmetric sample positions
        let xs: Vec<f64> = (0..=1000).map(|i| (i as f64 - 500.0) * 2e-6).collect();
        let f = |x: f64| -> f64 { lobes.iter().map(|&(a, c, w)| a * (-((x - c) / w).powi(2)).exp()).sum() };
        let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        let mirrored: Vec<f64> = xs.iter().map(|&x| f(-x)).collect();
        let mut p: Vec<f64> = find_peaks(&xs, &ys, 0.05).iter().map(|q| -q.x).collect();
        let mut q: Vec<f64> = find_peaks(&xs, &mirrored, 0.05).iter().map(|q| q.x).collect();
        p.sort_by(f64::total_cmp);
        q.sort_by(f64::total_cmp);
        prop_assert_eq!(p.len(), q.len());
        for (a, b) in p.iter().zip(&q) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        Ok(())
    })
}

pub fn power_law_recovery() -> Result<(), String> {
    run(64, (0.1..3.0f64, -2.0..2.0f64, prop::collection::vec(1e-2..1e3f64, 3..10)), |(a, p, mut xs)| {
        xs.sort_by(f64::total_cmp);
        xs.dedup_by(|x, y| (*x / *y - 1.0).abs() < 1e-6);
        prop_assume!(xs.len() >= 3);
        let ys: Vec<f64> = xs.iter().map(|x| a * x.powf(p)).collect();
        let law = fit_power_law(&xs, &ys).unwrap();
        prop_assert!((law.exponent - p).abs() < 1e-9);
        prop_assert!((law.prefactor / a - 1.0).abs() < 1e-9);
        Ok(())
    })
}

pub fn dispersion_symmetries() -> Result<(), String> {
    run(256, (1e-7..1e-4f64, 1e1..1e6f64), |(dn, k)| {
        let p = BogoliubovParams::new(-dn, 2.0 * PI / LAMBDA0);
        prop_assert_eq!(bogoliubov_omega(-k, &p), -bogoliubov_omega(k, &p));
        prop_assert_eq!(bogoliubov_group_velocity(-k, &p), bogoliubov_group_velocity(k, &p));
        prop_assert_eq!(landau_critical_speed(&p), sound_speed_angle(p.delta_n));
        let ratio = |q: f64| bogoliubov_omega(q, &p) / q;
        prop_assert!(ratio(1.01 * k) >= ratio(k));
        prop_assert!(ratio(k) >= sound_speed_angle(dn) * (1.0 - 1e-15));
        // group velocity from a centred difference
        let h = 1e-4 * k;
        let fd = (bogoliubov_omega(k + h, &p) - bogoliubov_omega(k - h, &p)) / (2.0 * h);
        let vg = bogoliubov_group_velocity(k, &p);
        prop_assert!(((fd - vg) / vg).abs() < 1e-6);
        Ok(())
    })
}

/// The trapezoid reconstruction of the analytic group velocity at 50
/// uniform samples up to 5e4 1/m stays within 0.5% of `Ω`.
pub fn analytic_bypass_quadrature() -> Result<(), String> {
    run(64, 1e-6..1e-4f64, |dn| {
        let p = BogoliubovParams::new(-dn, 2.0 * PI / LAMBDA0);
        let ks: Vec<f64> = (0..50).map(|i| 5e4 * i as f64 / 49.0).collect();
        let curve = analytic_dispersion_curve(&p, 0.075, &ks).unwrap();
        prop_assert_eq!(curve.samples[0].omega_reconstructed, 0.0);
        for s in &curve.samples[1..] {
            let rel = (s.omega_reconstructed - s.omega_analytic).abs() / s.omega_analytic;
            prop_assert!(rel < 5e-3, "k = {}: {}", s.k_perp, rel);
        }
        Ok(())
    })
}

pub fn reconstruction_is_monotone() -> Result<(), String> {
    run(128, prop::collection::vec((1.0..1e3f64, 1e-4..1e-1f64), 1..40), |steps| {
        let mut ks = vec![0.0];
        let mut vs = vec![steps[0].1];
        for &(dk, v) in &steps {
            ks.push(ks.last().unwrap() + dk);
            vs.push(v);
        }
        let w = reconstruct_dispersion(&ks, &vs).unwrap();
        prop_assert_eq!(w[0], 0.0);
        prop_assert!(w.windows(2).all(|p| p[1] > p[0]));
        Ok(())
    })
}

/// Parsing never panics; anything it accepts is internally consistent.
pub fn config_parsing_is_total() -> Result<(), String> {
    let keys = prop::sample::select(vec![
        "[medium]", "[pump]", "[probe]", "[grid]", "[scan]", "[bogus]", "lambda0 = 780e-9 m",
        "n2 = -3.1e-11 m2/W", "length = 0.075", "waist = -1", "waist = 1e-4 m", "n_points = 4096",
        "n_points = 1.5", "width = 8e-3 m", "intensity = 1e5 W/m2", "delta_n_target = 1e-5",
        "k_values = 0, 1e4", "k_values = ,", "k_max = nan", "filter = auto", "amplitude = 0.3",
        "= 3", "[", "x", "# comment", "intensities = 1, 2, 3 W/m2", "n_k = 0",
    ]);
    let structured = prop::collection::vec(keys, 0..30).prop_map(|lines| lines.join("\n"));
    let text = prop_oneof![structured, any::<String>(), "[a-z_\\[\\]=0-9. #\n-]{0,200}"];
    run(512, text, |text| {
        if let Ok(cfg) = load_config(&text) {
            prop_assert!(cfg.pump.intensity > 0.0);
            prop_assert!(cfg.probe.waist > 0.0);
            prop_assert!(cfg.n_points >= 2);
        }
        Ok(())
    })
}

pub fn snapshot_round_trip() -> Result<(), String> {
    run(64, (complex_vec(1usize..300), 1e-6..1.0f64, -1.0..1.0f64), |(samples, width, z)| {
        let g = make_grid(samples.len().max(2), width).unwrap();
        let mut samples = samples;
        samples.resize(g.n_points(), Complex64::new(0.5, -0.25));
        let f = ComplexField::new(g, samples, z).unwrap();
        let back = read_snapshot(&write_snapshot(&f, LAMBDA0)).unwrap();
        prop_assert_eq!(back.field.z().to_bits(), z.to_bits());
        prop_assert_eq!(back.field.grid().width().to_bits(), width.to_bits());
        for (a, b) in back.field.samples().iter().zip(f.samples()) {
            prop_assert_eq!(a.re.to_bits(), b.re.to_bits());
            prop_assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
        Ok(())
    })
}

pub fn snapshot_reader_is_total() -> Result<(), String> {
    let valid = write_snapshot(
        &ComplexField::new(make_grid(4, 1e-3).unwrap(), vec![Complex64::new(1.0, 2.0); 4], 0.0).unwrap(),
        LAMBDA0,
    );
    let mutated = (0..valid.len(), any::<u8>(), 0..valid.len() + 8).prop_map(move |(i, b, cut)| {
        let mut v = valid.clone();
        v[i] = b;
        v.truncate(cut);
        v
    });
    run(512, prop_oneof![prop::collection::vec(any::<u8>(), 0..200), mutated], |bytes| {
        let _ = read_snapshot(&bytes);
        Ok(())
    })
}

pub fn float_format_round_trips() -> Result<(), String> {
    let finite = any::<f64>().prop_filter("finite", |v| v.is_finite());
    run(1024, finite, |v| {
        let s = format_float(v);
        prop_assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits());
        let mantissa = s.trim_start_matches('-').split('e').next().unwrap();
        prop_assert_eq!(mantissa.len(), 18, "{}", s);
        Ok(())
    })
}

pub const PROPERTIES: &[(&str, Check)] = &[
    ("fft round trip", fft_round_trip),
    ("spectral ramp translates", spectral_ramp_translates),
    ("madelung recompose", madelung_recomposes),
    ("power conservation", power_is_conserved),
    ("nonlinear step keeps modulus", nonlinear_step_keeps_modulus),
    ("gaussian fit covariance", gaussian_fit_is_covariant),
    ("two-gaussian separation scaling", two_gaussian_separation_scales),
    ("peaks mirror", peaks_mirror),
    ("power-law recovery", power_law_recovery),
    ("dispersion symmetries", dispersion_symmetries),
    ("analytic-bypass quadrature", analytic_bypass_quadrature),
    ("reconstruction monotone", reconstruction_is_monotone),
    ("config parsing total", config_parsing_is_total),
    ("snapshot round trip", snapshot_round_trip),
    ("snapshot reader total", snapshot_reader_is_total),
    ("float format round trip", float_format_round_trips),
];
