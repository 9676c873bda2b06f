//! Complex optical amplitude on a [`Grid`].
//!
//! Samples are in sqrt(W/m²), so `|E|²` is an intensity and `n₂·|E|²` is the
//! nonlinear index directly.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Velocity is left undefined where the density falls below this fraction
/// of its maximum.
pub const DENSITY_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Arc<Grid>,
    samples: Vec<Complex64>,
    z: f64,
}

impl ComplexField {
    pub fn new(grid: Arc<Grid>, samples: Vec<Complex64>, z: f64) -> Result<Self> {
        if samples.len() != grid.n_points() {
            return Err(Error::InvalidArgument(format!(
                "field has {} samples but grid has {} points",
                samples.len(),
                grid.n_points()
            )));
        }
        if let Some(j) = samples.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidArgument(format!("non-finite sample at index {j}")));
        }
        Ok(Self { grid, samples, z })
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let samples = vec![Complex64::new(0.0, 0.0); grid.n_points()];
        Self { grid, samples, z: 0.0 }
    }

    /// Samples `f(x)` at every grid position.
    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let samples = grid.positions().iter().map(|&x| f(x)).collect();
        Self::new(grid, samples, 0.0)
    }

    pub(crate) fn from_parts_unchecked(grid: Arc<Grid>, samples: Vec<Complex64>, z: f64) -> Self {
        debug_assert_eq!(samples.len(), grid.n_points());
        Self { grid, samples, z }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn with_z(mut self, z: f64) -> Self {
        self.z = z;
        self
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.samples.iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.samples
            .iter()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Forward FFT of the samples, in grid wavenumber order.
    pub fn spectrum(&self) -> Vec<Complex64> {
        let mut buf = self.samples.clone();
        self.grid.forward(&mut buf);
        buf
    }

    /// Builds a field from spectral amplitudes in grid wavenumber order.
    pub fn from_spectrum(grid: Arc<Grid>, mut spectrum: Vec<Complex64>, z: f64) -> Result<Self> {
        if spectrum.len() != grid.n_points() {
            return Err(Error::InvalidArgument("spectrum length mismatch".into()));
        }
        grid.inverse(&mut spectrum);
        Self::new(grid, spectrum, z)
    }
}

/// `Σ|E_j|²·dx`, power per unit length along y (W/m).
pub fn total_power(field: &ComplexField) -> f64 {
    field.samples.iter().map(|v| v.norm_sqr()).sum::<f64>() * field.grid.dx()
}

/// Hydrodynamic view of a field: `E = √ρ·exp(iΦ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MadelungFields {
    /// `|E|²` (W/m²).
    pub density: Vec<f64>,
    /// Argument of `E`, unwrapped outward from the window centre (rad).
    pub phase: Vec<f64>,
    /// `(1/k₀)·∂Φ/∂x` as a transverse angle (rad); `None` below the density floor.
    pub velocity: Vec<Option<f64>>,
}

impl MadelungFields {
    /// `√ρ·exp(iΦ)` at every sample.
    pub fn recompose(&self) -> Vec<Complex64> {
        self.density
            .iter()
            .zip(&self.phase)
            .map(|(&rho, &phi)| Complex64::from_polar(rho.sqrt(), phi))
            .collect()
    }

    pub fn is_defined(&self, j: usize) -> bool {
        self.velocity[j].is_some()
    }
}

fn wrap(angle: f64) -> f64 {
    let mut a = angle % (2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    } else if a <= -PI {
        a += 2.0 * PI;
    }
    a
}

pub fn madelung_decompose(field: &ComplexField, k0: f64) -> MadelungFields {
    let samples = field.samples();
    let n = samples.len();
    let dx = field.grid().dx();
    let density: Vec<f64> = samples.iter().map(|v| v.norm_sqr()).collect();
    let max_rho = density.iter().copied().fold(0.0, f64::max);
    let floor = DENSITY_FLOOR * max_rho;
    let above = |j: usize| max_rho > 0.0 && density[j] > floor;

    let raw: Vec<f64> = samples.iter().map(|v| v.arg()).collect();
    let mut phase = raw.clone();
    let c = field.grid().center_index();
    for j in c + 1..n {
        phase[j] = phase[j - 1] + wrap(raw[j] - phase[j - 1]);
    }
    for j in (0..c).rev() {
        phase[j] = phase[j + 1] + wrap(raw[j] - phase[j + 1]);
    }

    // Phase gradient from neighbour products; exact for a sampled plane wave.
    let velocity = (0..n)
        .map(|j| {
            if !above(j) {
                return None;
            }
            let (lo, hi) = match j {
                0 => (0, 1),
                _ if j == n - 1 => (n - 2, n - 1),
                _ => (j - 1, j + 1),
            };
            if !(above(lo) && above(hi)) {
                return None;
            }
            let dphi = (samples[hi] * samples[lo].conj()).arg();
            Some(dphi / ((hi - lo) as f64 * dx) / k0)
        })
        .collect();

    MadelungFields {
        density,
        phase,
        velocity,
    }
}
