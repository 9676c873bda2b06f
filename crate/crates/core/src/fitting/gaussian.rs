//! Single and double Gaussian least-squares fits.
//!
//! Fits run in normalized coordinates (`x` centred and scaled to the data
//! span, `y` scaled to its largest magnitude) so that micron-scale positions
//! and large intensities condition the normal equations equally well.
//! Results are mapped back, which makes every fit covariant under
//! translation and scaling of the data.

use crate::error::{Error, Result};
use crate::fitting::lm::{levenberg_marquardt, LmConfig, Model};

/// `A·exp(-(x - x₀)²/2σ²) + b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianModel {
    pub amplitude: f64,
    pub center: f64,
    /// Standard deviation σ.
    pub width: f64,
    pub offset: f64,
}

impl GaussianModel {
    pub fn new(amplitude: f64, center: f64, width: f64, offset: f64) -> Self {
        Self {
            amplitude,
            center,
            width,
            offset,
        }
    }

    /// Value without the offset.
    pub fn peak(&self, x: f64) -> f64 {
        let u = (x - self.center) / self.width;
        self.amplitude * (-0.5 * u * u).exp()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.peak(x) + self.offset
    }

    pub fn fwhm(&self) -> f64 {
        2.0 * (2.0 * 2f64.ln()).sqrt() * self.width
    }
}

/// Two Gaussian components sharing one offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoGaussianFit {
    /// Ordered by centre; both carry the shared offset.
    pub components: [GaussianModel; 2],
    /// `x₂ - x₁ ≥ 0`.
    pub separation: f64,
    pub rms: f64,
    /// Collapsed, vanishing or unconverged solution; the separation is meaningless.
    pub degenerate: bool,
    /// Centres closer than twice the mean width; the separation is biased low.
    pub overlapping: bool,
}

impl TwoGaussianFit {
    /// Initial guess from two peak positions and heights above `offset`.
    pub fn initial(first: (f64, f64), second: (f64, f64), width: f64, offset: f64) -> Self {
        let a = GaussianModel::new(first.1 - offset, first.0, width, offset);
        let b = GaussianModel::new(second.1 - offset, second.0, width, offset);
        Self::ordered(a, b, 0.0, 0.0)
    }

    fn ordered(a: GaussianModel, b: GaussianModel, rms: f64, min_separation: f64) -> Self {
        let components = if b.center < a.center { [b, a] } else { [a, b] };
        let separation = components[1].center - components[0].center;
        let mean_width = 0.5 * (components[0].width + components[1].width);
        let amax = a.amplitude.max(b.amplitude);
        let amin = a.amplitude.min(b.amplitude);
        Self {
            components,
            separation,
            rms,
            degenerate: separation < min_separation || amin <= 0.01 * amax,
            overlapping: separation < 2.0 * mean_width,
        }
    }

    pub fn offset(&self) -> f64 {
        self.components[0].offset
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.components[0].peak(x) + self.components[1].peak(x) + self.offset()
    }
}

struct Single;

impl Model for Single {
    fn n_params(&self) -> usize {
        4
    }

    fn value(&self, x: f64, p: &[f64]) -> f64 {
        let u = (x - p[1]) / p[2];
        p[0] * (-0.5 * u * u).exp() + p[3]
    }

    fn gradient(&self, x: f64, p: &[f64], out: &mut [f64]) {
        let u = (x - p[1]) / p[2];
        let e = (-0.5 * u * u).exp();
        out[0] = e;
        out[1] = p[0] * e * u / p[2];
        out[2] = p[0] * e * u * u / p[2];
        out[3] = 1.0;
    }
}

struct Double;

impl Model for Double {
    fn n_params(&self) -> usize {
        7
    }

    fn value(&self, x: f64, p: &[f64]) -> f64 {
        let u = (x - p[1]) / p[2];
        let v = (x - p[4]) / p[5];
        p[0] * (-0.5 * u * u).exp() + p[3] * (-0.5 * v * v).exp() + p[6]
    }

    fn gradient(&self, x: f64, p: &[f64], out: &mut [f64]) {
        for base in [0usize, 3] {
            let u = (x - p[base + 1]) / p[base + 2];
            let e = (-0.5 * u * u).exp();
            out[base] = e;
            out[base + 1] = p[base] * e * u / p[base + 2];
            out[base + 2] = p[base] * e * u * u / p[base + 2];
        }
        out[6] = 1.0;
    }
}

/// Affine map from data coordinates to the unit box the optimizer sees.
struct Normalization {
    x_mid: f64,
    x_scale: f64,
    y_scale: f64,
}

impl Normalization {
    fn new(xs: &[f64], ys: &[f64]) -> Result<Self> {
        let (lo, hi) = xs
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| (l.min(x), h.max(x)));
        let y_scale = ys.iter().fold(0.0f64, |m, y| m.max(y.abs()));
        let y_min = ys.iter().copied().fold(f64::INFINITY, f64::min);
        let y_max = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(degenerate("x samples do not span an interval"));
        }
        if !(y_max > y_min) || !y_scale.is_finite() {
            return Err(degenerate("flat data, no peak to fit"));
        }
        Ok(Self {
            x_mid: 0.5 * (lo + hi),
            x_scale: 0.5 * (hi - lo),
            y_scale,
        })
    }

    fn xs(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|x| (x - self.x_mid) / self.x_scale).collect()
    }

    fn ys(&self, ys: &[f64]) -> Vec<f64> {
        ys.iter().map(|y| y / self.y_scale).collect()
    }

    fn to_unit(&self, g: &GaussianModel) -> [f64; 3] {
        [
            g.amplitude / self.y_scale,
            (g.center - self.x_mid) / self.x_scale,
            g.width / self.x_scale,
        ]
    }

    fn unit_to_model(&self, p: &[f64], offset: f64) -> GaussianModel {
        GaussianModel::new(
            p[0] * self.y_scale,
            p[1] * self.x_scale + self.x_mid,
            p[2].abs() * self.x_scale,
            offset * self.y_scale,
        )
    }
}

fn degenerate(reason: &str) -> Error {
    Error::FitFailure {
        reason: reason.into(),
        iterations: 0,
        rms: f64::NAN,
        last: Vec::new(),
    }
}

fn check_inputs(xs: &[f64], ys: &[f64], min_len: usize) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidArgument("xs and ys differ in length".into()));
    }
    if xs.len() < min_len {
        return Err(Error::InvalidArgument(format!(
            "need at least {min_len} samples, got {}",
            xs.len()
        )));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite sample".into()));
    }
    Ok(())
}

/// Least-squares Gaussian plus offset.
///
/// Flat data (including all zeros) has no peak and is a fit failure, as is
/// a solution with negative amplitude.
pub fn fit_gaussian(xs: &[f64], ys: &[f64], init: &GaussianModel) -> Result<GaussianModel> {
    check_inputs(xs, ys, 8)?;
    if !(init.width.is_finite() && init.width > 0.0) {
        return Err(Error::InvalidArgument("initial width must be positive".into()));
    }
    let norm = Normalization::new(xs, ys)?;
    let ux = norm.xs(xs);
    let uy = norm.ys(ys);
    let [a, c, w] = norm.to_unit(init);
    let start = [a, c, w, init.offset / norm.y_scale];
    let out = levenberg_marquardt(&Single, &ux, &uy, &start, &LmConfig::default())?;
    let fit = norm.unit_to_model(&out.params[..3], out.params[3]);
    if fit.amplitude < 0.0 {
        return Err(Error::FitFailure {
            reason: "negative amplitude".into(),
            iterations: out.iterations,
            rms: out.rms * norm.y_scale,
            last: vec![fit.amplitude, fit.center, fit.width, fit.offset],
        });
    }
    Ok(fit)
}

/// Least-squares sum of two Gaussians with a shared offset.
///
/// Flat data is an error. An unconverged fit, components closer than one
/// sample spacing, or one component vanishing next to the other come back
/// with `degenerate` set.
pub fn fit_two_gaussian(xs: &[f64], ys: &[f64], init: &TwoGaussianFit) -> Result<TwoGaussianFit> {
    check_inputs(xs, ys, 8)?;
    let dx = xs
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .fold(f64::INFINITY, f64::min);
    let norm = Normalization::new(xs, ys)?;
    let ux = norm.xs(xs);
    let uy = norm.ys(ys);
    let [a1, c1, w1] = norm.to_unit(&init.components[0]);
    let [a2, c2, w2] = norm.to_unit(&init.components[1]);
    let start = [a1, c1, w1, a2, c2, w2, init.offset() / norm.y_scale];

    match levenberg_marquardt(&Double, &ux, &uy, &start, &LmConfig::default()) {
        Ok(out) => {
            let p = &out.params;
            let a = norm.unit_to_model(&p[0..3], p[6]);
            let b = norm.unit_to_model(&p[3..6], p[6]);
            let fit = TwoGaussianFit::ordered(a, b, out.rms * norm.y_scale, dx);
            Ok(fit)
        }
        Err(Error::FitFailure { last, rms, .. }) if last.len() == 7 => {
            let a = norm.unit_to_model(&last[0..3], last[6]);
            let b = norm.unit_to_model(&last[3..6], last[6]);
            let mut fit = TwoGaussianFit::ordered(a, b, rms * norm.y_scale, dx);
            fit.degenerate = true;
            Ok(fit)
        }
        Err(e) => Err(e),
    }
}
