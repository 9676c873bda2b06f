//! The group-velocity measurement protocol on simulated data.
//!
//! A weak Gaussian probe with transverse wavevector `k⊥` is superposed on a
//! uniform pump and propagated through the cell. The pump-only output is
//! subtracted, the relative phase is scanned over `2π` and the absolute
//! differences are averaged into an envelope. The separation of the
//! excitation lobes in that envelope gives `v_g(k⊥)`, and integrating
//! `v_g` over `k⊥` reconstructs `Ω(k⊥)`.

use std::f64::consts::PI;
use std::sync::Arc;

use log::{info, warn};
use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::fitting::{
    find_peaks, fit_gaussian, fit_power_law, fit_two_gaussian, half_max_width, lowpass_filter,
    median, GaussianModel, PeakLocation, TwoGaussianFit,
};
use crate::grid::Grid;
use crate::io::config::ExperimentConfig;
use crate::medium::{bogoliubov_group_velocity, bogoliubov_omega, BogoliubovParams};
use crate::ssfm::Propagator;

/// Conjugate lobes lower than this fraction of the primary switch the
/// measurement to displacement mode.
pub const CONJUGATE_THRESHOLD: f64 = 0.15;

/// Peaks below this fraction of the envelope maximum are ignored.
const PEAK_FLOOR: f64 = 0.05;

/// Minimum fraction of scan points that must yield a measurement.
const MIN_SUCCESS_FRACTION: f64 = 0.7;

const FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949;

/// Uniform background beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpSpec {
    /// W/m².
    pub intensity: f64,
}

impl PumpSpec {
    pub fn new(intensity: f64) -> Result<Self> {
        if !(intensity.is_finite() && intensity > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "pump intensity must be positive, got {intensity}"
            )));
        }
        Ok(Self { intensity })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSpec {
    /// Field amplitude relative to the pump.
    pub amplitude: f64,
    /// 1/e field radius (m).
    pub waist: f64,
    /// 1/m.
    pub k_perp: f64,
    /// rad.
    pub phase: f64,
}

impl ProbeSpec {
    pub fn new(amplitude: f64, waist: f64) -> Self {
        Self {
            amplitude,
            waist,
            k_perp: 0.0,
            phase: 0.0,
        }
    }

    pub fn with_k_perp(mut self, k_perp: f64) -> Self {
        self.k_perp = k_perp;
        self
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }
}

/// How the averaged envelope is low-pass filtered before fitting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FilterPolicy {
    /// `max(|k⊥|/2, 6/w)` for `k⊥ ≠ 0`, no filtering at `k⊥ = 0`.
    Auto,
    None,
    Fixed(f64),
}

impl FilterPolicy {
    pub fn cutoff(&self, k_perp: f64, probe_waist: f64) -> Option<f64> {
        match *self {
            FilterPolicy::Auto if k_perp != 0.0 => Some((0.5 * k_perp.abs()).max(6.0 / probe_waist)),
            FilterPolicy::Auto | FilterPolicy::None => None,
            FilterPolicy::Fixed(c) => Some(c),
        }
    }
}

/// `E(x, 0) = √I₀·[1 + a·exp(-x²/w²)·exp(i(k⊥x + φ))]`.
pub fn synthesize_input(grid: &Arc<Grid>, pump: &PumpSpec, probe: &ProbeSpec) -> Result<ComplexField> {
    if !(pump.intensity.is_finite() && pump.intensity > 0.0) {
        return Err(Error::InvalidConfiguration(format!(
            "pump intensity must be positive, got {}",
            pump.intensity
        )));
    }
    if !(probe.amplitude >= 0.0 && probe.amplitude <= 0.2) {
        return Err(Error::InvalidConfiguration(format!(
            "probe amplitude must lie in [0, 0.2], got {}",
            probe.amplitude
        )));
    }
    if !(probe.waist >= 8.0 * grid.dx()) {
        return Err(Error::InvalidConfiguration(format!(
            "probe waist {:e} m spans fewer than 8 grid points (dx = {:e} m)",
            probe.waist,
            grid.dx()
        )));
    }
    if !(probe.k_perp.abs() < 0.5 * grid.nyquist()) {
        return Err(Error::InvalidConfiguration(format!(
            "probe k_perp {:e} 1/m is not below half the Nyquist wavenumber {:e} 1/m",
            probe.k_perp,
            grid.nyquist()
        )));
    }
    let root = pump.intensity.sqrt();
    let (a, w, k, phi) = (probe.amplitude, probe.waist, probe.k_perp, probe.phase);
    ComplexField::from_fn(grid.clone(), |x| {
        let bump = a * (-(x / w).powi(2)).exp();
        root * (Complex64::new(1.0, 0.0) + Complex64::from_polar(bump, k * x + phi))
    })
}

/// Phase-averaged, background-subtracted output envelope for one `k⊥`.
#[derive(Debug, Clone)]
pub struct Envelope {
    pub grid: Arc<Grid>,
    pub k_perp: f64,
    /// W/m², non-negative.
    pub values: Vec<f64>,
    /// Low-pass cutoff that was applied, if any.
    pub cutoff: Option<f64>,
}

/// Runs the phase scan at `k_perp` and returns the averaged envelope
/// `⟨|I(x, L; φ) - I_bg(x, L)|⟩_φ`, filtered per `config.filter`.
pub fn phase_scan_envelope(config: &ExperimentConfig, k_perp: f64) -> Result<Envelope> {
    let grid = config.grid()?;
    let n_phase = config.n_phase;
    if n_phase == 0 {
        return Err(Error::InvalidConfiguration("n_phase must be >= 1".into()));
    }
    let plan = config.plan.clone().with_snapshots(0);
    let probe = config.probe.with_k_perp(k_perp);
    // validates the probe before any propagation
    synthesize_input(&grid, &config.pump, &probe)?;

    let pump_only = ProbeSpec {
        amplitude: 0.0,
        ..probe
    };
    let background = Propagator::new(grid.clone(), config.medium, plan.clone())?
        .run(&synthesize_input(&grid, &config.pump, &pump_only)?)?
        .final_field
        .intensity();

    let per_phase: Vec<Vec<f64>> = (0..n_phase)
        .into_par_iter()
        .map_init(
            || Propagator::new(grid.clone(), config.medium, plan.clone()),
            |prop, j| {
                let prop = prop.as_mut().map_err(|e| Error::InvalidConfiguration(e.to_string()))?;
                let phi = probe.phase + 2.0 * PI * j as f64 / n_phase as f64;
                let input = synthesize_input(&grid, &config.pump, &probe.with_phase(phi))?;
                let out = prop.run(&input)?.final_field;
                Ok(out
                    .samples()
                    .iter()
                    .zip(&background)
                    .map(|(e, b)| (e.norm_sqr() - b).abs())
                    .collect())
            },
        )
        .collect::<Result<_>>()?;

    let mut values = vec![0.0; grid.n_points()];
    for diff in &per_phase {
        for (v, d) in values.iter_mut().zip(diff) {
            *v += d;
        }
    }
    for v in values.iter_mut() {
        *v /= n_phase as f64;
    }

    let cutoff = config.filter.cutoff(k_perp, config.probe.waist);
    if let Some(c) = cutoff {
        values = lowpass_filter(&values, c, &grid)?;
    }
    Ok(Envelope {
        grid,
        k_perp,
        values,
        cutoff,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureMode {
    /// Separation of the probe and conjugate lobes from a two-Gaussian fit.
    TwoGaussian,
    /// Distance travelled by the probe lobe from the input centre.
    Displacement,
    /// No simulation: `v_g` from the closed-form dispersion.
    Analytic,
}

impl MeasureMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            MeasureMode::TwoGaussian => "two-gaussian",
            MeasureMode::Displacement => "displacement",
            MeasureMode::Analytic => "analytic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub k_perp: f64,
    /// `D = 2·L·v_g` (m). In displacement mode this is twice the measured
    /// displacement.
    pub separation: f64,
    /// rad.
    pub v_g: f64,
    pub mode: MeasureMode,
    /// Fitted lobes closer than twice their width; `D` is biased low.
    pub overlapping: bool,
    /// Mean fitted lobe σ (m).
    pub lobe_width: f64,
}

fn window(xs: &[f64], lo: f64, hi: f64) -> std::ops::Range<usize> {
    let start = xs.partition_point(|&x| x < lo);
    let end = xs.partition_point(|&x| x <= hi);
    start..end
}

/// Extracts `D` and `v_g` from an envelope after propagation over `length`.
///
/// The highest peak is the primary lobe and the highest peak on the other
/// side of the origin its conjugate. A conjugate at least
/// [`CONJUGATE_THRESHOLD`] of the primary (above the median baseline), or
/// `k⊥ = 0`, selects a two-Gaussian fit with `v_g = D/2L`; otherwise a
/// single Gaussian is fitted to the primary and `v_g = |x_out|/L`. At
/// `k⊥ = 0` the fit starts from symmetric centres.
pub fn measure_separation(envelope: &Envelope, length: f64) -> Result<Measurement> {
    let k = envelope.k_perp;
    let fail = |reason: String| Error::MeasurementFailure { k_perp: k, reason };
    let xs = envelope.grid.positions();
    let ys = &envelope.values;
    if ys.iter().any(|v| !v.is_finite()) {
        return Err(fail("envelope is not finite".into()));
    }

    let peaks = find_peaks(xs, ys, PEAK_FLOOR);
    let Some(&primary) = peaks.first() else {
        return Err(fail("no peak in envelope".into()));
    };
    let offset = median(ys);
    let height = |p: &PeakLocation| p.y - offset;
    if !(height(&primary) > 0.0) {
        return Err(fail("envelope has no structure above its baseline".into()));
    }
    let fwhm = half_max_width(xs, ys, primary.index, offset)
        .ok_or_else(|| fail("primary lobe has no half-maximum crossing".into()))?;
    let sigma = fwhm / FWHM_PER_SIGMA;
    let conjugate = peaks
        .iter()
        .find(|p| p.x * primary.x < 0.0 && height(p) >= CONJUGATE_THRESHOLD * height(&primary))
        .copied();

    let two_gaussian = |first: (f64, f64), second: (f64, f64)| -> Result<Measurement> {
        let lo = first.0.min(second.0) - 3.0 * fwhm;
        let hi = first.0.max(second.0) + 3.0 * fwhm;
        let r = window(xs, lo, hi);
        let init = TwoGaussianFit::initial(first, second, sigma, offset);
        let fit = fit_two_gaussian(&xs[r.clone()], &ys[r], &init)?;
        if fit.degenerate {
            return Err(fail(format!(
                "degenerate two-Gaussian fit (separation {:e} m)",
                fit.separation
            )));
        }
        Ok(Measurement {
            k_perp: k,
            separation: fit.separation,
            v_g: fit.separation / (2.0 * length),
            mode: MeasureMode::TwoGaussian,
            overlapping: fit.overlapping,
            lobe_width: 0.5 * (fit.components[0].width + fit.components[1].width),
        })
    };
    let symmetric = |half_sep: f64, y: f64| two_gaussian((-half_sep, y), (half_sep, y));

    let result = match conjugate {
        Some(c) if k == 0.0 => symmetric(0.5 * (primary.x.abs() + c.x.abs()), 0.5 * (primary.y + c.y)),
        Some(c) => two_gaussian((primary.x, primary.y), (c.x, c.y)),
        None if k == 0.0 => symmetric(primary.x.abs().max(0.25 * fwhm), primary.y),
        None if primary.x.abs() < 0.5 * fwhm => symmetric(0.25 * fwhm, primary.y),
        None => {
            let r = window(xs, primary.x - 3.0 * fwhm, primary.x + 3.0 * fwhm);
            let init = GaussianModel::new(height(&primary), primary.x, sigma, offset);
            let g = fit_gaussian(&xs[r.clone()], &ys[r], &init)?;
            let displacement = g.center.abs();
            Ok(Measurement {
                k_perp: k,
                separation: 2.0 * displacement,
                v_g: displacement / length,
                mode: MeasureMode::Displacement,
                overlapping: false,
                lobe_width: g.width,
            })
        }
    };
    result.map_err(|e| match e {
        Error::FitFailure { reason, .. } => fail(reason),
        other => other,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionSample {
    pub k_perp: f64,
    pub v_g: f64,
    pub mode: MeasureMode,
    pub separation: f64,
    pub omega_reconstructed: f64,
    pub omega_analytic: f64,
    pub overlapping: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanFailure {
    /// `k⊥` (1/m) or intensity (W/m²) of the failed point.
    pub at: f64,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DispersionCurve {
    /// Successful points, ordered by `k⊥`.
    pub samples: Vec<DispersionSample>,
    pub failures: Vec<ScanFailure>,
}

impl DispersionCurve {
    pub fn k_values(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.k_perp).collect()
    }

    pub fn group_velocities(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.v_g).collect()
    }
}

/// `Ω(k_i) = ∫₀^{k_i} v_g dk` by the trapezoidal rule over sorted samples.
///
/// If the first sample is not at `k = 0`, `v_g` is held constant down to 0.
pub fn reconstruct_dispersion(ks: &[f64], v_g: &[f64]) -> Result<Vec<f64>> {
    if ks.len() != v_g.len() {
        return Err(Error::InvalidArgument("k and v_g differ in length".into()));
    }
    if ks.windows(2).any(|w| !(w[1] > w[0])) || ks.first().is_some_and(|&k| k < 0.0) {
        return Err(Error::InvalidArgument(
            "k values must be non-negative and strictly increasing".into(),
        ));
    }
    let mut omega = Vec::with_capacity(ks.len());
    let (mut k_prev, mut v_prev, mut acc) = (0.0, v_g.first().copied().unwrap_or(0.0), 0.0);
    for (&k, &v) in ks.iter().zip(v_g) {
        acc += 0.5 * (v + v_prev) * (k - k_prev);
        omega.push(acc);
        k_prev = k;
        v_prev = v;
    }
    Ok(omega)
}

fn validate_k_list(ks: &[f64]) -> Result<()> {
    if ks.is_empty() {
        return Err(Error::InvalidConfiguration("k_perp list is empty".into()));
    }
    if ks.iter().any(|k| !(k.is_finite() && *k >= 0.0)) || ks.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidConfiguration(
            "k_perp values must be non-negative and strictly increasing".into(),
        ));
    }
    if ks[0] != 0.0 {
        return Err(Error::InvalidConfiguration("k_perp list must start at 0".into()));
    }
    Ok(())
}

fn assemble_curve(
    params: &BogoliubovParams,
    measurements: Vec<Measurement>,
    failures: Vec<ScanFailure>,
) -> Result<DispersionCurve> {
    let ks: Vec<f64> = measurements.iter().map(|m| m.k_perp).collect();
    let vs: Vec<f64> = measurements.iter().map(|m| m.v_g).collect();
    let omega = reconstruct_dispersion(&ks, &vs)?;
    let samples = measurements
        .iter()
        .zip(omega)
        .map(|(m, w)| DispersionSample {
            k_perp: m.k_perp,
            v_g: m.v_g,
            mode: m.mode,
            separation: m.separation,
            omega_reconstructed: w,
            omega_analytic: bogoliubov_omega(m.k_perp, params),
            overlapping: m.overlapping,
        })
        .collect();
    Ok(DispersionCurve { samples, failures })
}

/// Measures `v_g` at every configured `k⊥` and reconstructs `Ω(k⊥)`.
///
/// Points whose measurement fails are reported as gaps; the scan fails if
/// fewer than 70% of the points succeed. Propagation errors abort the scan.
pub fn run_dispersion_scan(config: &ExperimentConfig) -> Result<DispersionCurve> {
    let ks = config.k_values();
    validate_k_list(&ks)?;
    let envelopes = ks
        .par_iter()
        .map(|&k| phase_scan_envelope(config, k))
        .collect::<Result<Vec<_>>>()?;
    dispersion_from_envelopes(config, &envelopes)
}

/// The measurement and reconstruction half of [`run_dispersion_scan`], for
/// envelopes that were already computed (one per `k⊥`, increasing).
pub fn dispersion_from_envelopes(config: &ExperimentConfig, envelopes: &[Envelope]) -> Result<DispersionCurve> {
    let ks: Vec<f64> = envelopes.iter().map(|e| e.k_perp).collect();
    validate_k_list(&ks)?;
    let params = config.bogoliubov()?;
    let length = config.medium.length();

    let mut measurements = Vec::new();
    let mut failures = Vec::new();
    for env in envelopes {
        let k = env.k_perp;
        match measure_separation(env, length) {
            Ok(m) => {
                info!("k = {k:e} 1/m: v_g = {:e} rad ({})", m.v_g, m.mode.as_str());
                measurements.push(m);
            }
            Err(Error::MeasurementFailure { reason, .. }) => {
                warn!("k = {k:e} 1/m: {reason}");
                failures.push(ScanFailure { at: k, reason });
            }
            Err(e) => return Err(e),
        }
    }
    if (measurements.len() as f64) < MIN_SUCCESS_FRACTION * ks.len() as f64 {
        return Err(Error::MeasurementFailure {
            k_perp: failures.first().map_or(f64::NAN, |f| f.at),
            reason: format!("only {} of {} scan points succeeded", measurements.len(), ks.len()),
        });
    }
    assemble_curve(&params, measurements, failures)
}

/// The dispersion curve with `v_g` taken from the closed form instead of a
/// simulation, reconstructed by the same quadrature.
pub fn analytic_dispersion_curve(params: &BogoliubovParams, length: f64, ks: &[f64]) -> Result<DispersionCurve> {
    validate_k_list(ks)?;
    let measurements = ks
        .iter()
        .map(|&k| {
            let v = bogoliubov_group_velocity(k, params);
            Measurement {
                k_perp: k,
                separation: 2.0 * length * v,
                v_g: v,
                mode: MeasureMode::Analytic,
                overlapping: false,
                lobe_width: f64::NAN,
            }
        })
        .collect();
    assemble_curve(params, measurements, Vec::new())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SoundSpeedSample {
    /// W/m².
    pub intensity: f64,
    /// Measured sound speed (rad).
    pub c_s: f64,
    /// `√|n₂·I|` (rad).
    pub c_s_analytic: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SoundSpeedScan {
    pub samples: Vec<SoundSpeedSample>,
    pub exponent: f64,
    pub prefactor: f64,
    pub failures: Vec<ScanFailure>,
}

/// Measures the `k⊥ = 0` packet speed at each intensity and fits
/// `c_s = A·I^p`.
pub fn run_sound_speed_scan(config: &ExperimentConfig, intensities: &[f64]) -> Result<SoundSpeedScan> {
    if intensities.len() < 3 {
        return Err(Error::InvalidConfiguration(format!(
            "sound-speed scan needs at least 3 intensities, got {}",
            intensities.len()
        )));
    }
    if intensities.iter().any(|i| !(i.is_finite() && *i > 0.0))
        || intensities.windows(2).any(|w| !(w[1] > w[0]))
    {
        return Err(Error::InvalidConfiguration(
            "intensities must be positive and strictly increasing".into(),
        ));
    }
    let length = config.medium.length();
    let results: Vec<Result<Measurement>> = intensities
        .par_iter()
        .map(|&intensity| {
            let mut cfg = config.clone();
            cfg.pump = PumpSpec::new(intensity)?;
            let env = phase_scan_envelope(&cfg, 0.0)?;
            measure_separation(&env, length)
        })
        .collect();

    let mut samples = Vec::new();
    let mut failures = Vec::new();
    for (&intensity, r) in intensities.iter().zip(results) {
        match r {
            Ok(m) => samples.push(SoundSpeedSample {
                intensity,
                c_s: m.v_g,
                c_s_analytic: (config.medium.n2() * intensity).abs().sqrt(),
            }),
            Err(Error::MeasurementFailure { reason, .. }) => {
                warn!("I = {intensity:e} W/m2: {reason}");
                failures.push(ScanFailure { at: intensity, reason });
            }
            Err(e) => return Err(e),
        }
    }
    if samples.len() < 3 {
        return Err(Error::MeasurementFailure {
            k_perp: 0.0,
            reason: format!("only {} intensities yielded a sound speed", samples.len()),
        });
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.intensity).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.c_s).collect();
    let law = fit_power_law(&xs, &ys)?;
    Ok(SoundSpeedScan {
        samples,
        exponent: law.exponent,
        prefactor: law.prefactor,
        failures,
    })
}
