use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakLocation {
    pub index: usize,
    pub x: f64,
    pub y: f64,
}

/// Interior local maxima with `y ≥ min_prominence·max(ys)`, highest first.
///
/// A sample is a maximum when it is strictly above its left neighbour and
/// not below its right one, so a flat plateau contributes its left edge and
/// constant data has no peaks. Ties in height are ordered by position.
pub fn find_peaks(xs: &[f64], ys: &[f64], min_prominence: f64) -> Vec<PeakLocation> {
    let n = ys.len().min(xs.len());
    if n < 3 {
        return Vec::new();
    }
    let top = ys[..n].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(top > 0.0) {
        return Vec::new();
    }
    let threshold = min_prominence * top;
    let mut peaks: Vec<PeakLocation> = (1..n - 1)
        .filter(|&i| ys[i] > ys[i - 1] && ys[i] >= ys[i + 1] && ys[i] >= threshold)
        .map(|i| PeakLocation {
            index: i,
            x: xs[i],
            y: ys[i],
        })
        .collect();
    peaks.sort_by(|a, b| b.y.total_cmp(&a.y).then(a.x.total_cmp(&b.x)));
    peaks
}

/// Full width at half maximum of the peak at `index` above `baseline`,
/// from linearly interpolated crossings. When only one side crosses, the
/// width is twice that half-width.
pub fn half_max_width(xs: &[f64], ys: &[f64], index: usize, baseline: f64) -> Option<f64> {
    let half = baseline + 0.5 * (ys[index] - baseline);
    let crossing = |range: &mut dyn Iterator<Item = usize>, step: isize| -> Option<f64> {
        for i in range {
            let j = (i as isize - step) as usize;
            if ys[i] < half {
                let t = (ys[j] - half) / (ys[j] - ys[i]);
                return Some(xs[j] + t * (xs[i] - xs[j]));
            }
        }
        None
    };
    let left = crossing(&mut (0..index).rev(), -1);
    let right = crossing(&mut (index + 1..ys.len()), 1);
    match (left, right) {
        (Some(l), Some(r)) => Some(r - l),
        (Some(l), None) => Some(2.0 * (xs[index] - l)),
        (None, Some(r)) => Some(2.0 * (r - xs[index])),
        (None, None) => None,
    }
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Spectral low-pass with a raised-cosine roll-off over the top 10% of the
/// band: unity gain below `0.9·cutoff`, zero above `cutoff`. The output is
/// real and clipped at zero. A cutoff at or beyond Nyquist is the identity.
pub fn lowpass_filter(ys: &[f64], cutoff: f64, grid: &Grid) -> Result<Vec<f64>> {
    if !(cutoff > 0.0) {
        return Err(Error::InvalidArgument(format!("cutoff must be positive, got {cutoff}")));
    }
    if ys.len() != grid.n_points() {
        return Err(Error::InvalidArgument("signal length does not match grid".into()));
    }
    if cutoff >= grid.nyquist() {
        return Ok(ys.iter().map(|&y| y.max(0.0)).collect());
    }
    let edge = 0.9 * cutoff;
    let mut buf: Vec<Complex64> = ys.iter().map(|&y| Complex64::new(y, 0.0)).collect();
    grid.forward(&mut buf);
    for (v, &k) in buf.iter_mut().zip(grid.wavenumbers()) {
        let q = k.abs();
        let gain = if q <= edge {
            1.0
        } else if q >= cutoff {
            0.0
        } else {
            0.5 * (1.0 + (PI * (q - edge) / (cutoff - edge)).cos())
        };
        *v *= gain;
    }
    grid.inverse(&mut buf);
    Ok(buf.iter().map(|v| v.re.max(0.0)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLaw {
    pub exponent: f64,
    pub prefactor: f64,
}

impl PowerLaw {
    pub fn eval(&self, x: f64) -> f64 {
        self.prefactor * x.powf(self.exponent)
    }
}

/// `y = A·x^p` by ordinary least squares on `(ln x, ln y)`.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<PowerLaw> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidArgument("xs and ys differ in length".into()));
    }
    if xs.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "power-law fit needs at least 3 points, got {}",
            xs.len()
        )));
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidArgument("power-law fit needs positive data".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("all x values are equal".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let exponent = sxy / sxx;
    Ok(PowerLaw {
        exponent,
        prefactor: (my - exponent * mx).exp(),
    })
}
