//! Uniform 1D transverse sampling and the FFT conventions shared by the
//! propagator and the analysis code.
//!
//! Positions are centred: `x_j = (j - n/2)·dx`, so `x = 0` sits at index
//! `n/2`. Wavenumbers follow FFT index order, `k_j = 2π·j/width` for
//! `j < n/2` and `2π·(j - n)/width` otherwise. For even `n` the Nyquist
//! component is therefore assigned to the negative branch, `-π/dx`.
//!
//! The forward transform is unnormalized, the inverse carries the `1/n`
//! factor, and a plane wave `exp(+i·k·x)` lands in the bin whose wavenumber
//! is `+k`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

#[derive(Clone)]
pub struct Grid {
    n_points: usize,
    width: f64,
    dx: f64,
    positions: Vec<f64>,
    wavenumbers: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Grid {
    pub fn new(n_points: usize, width: f64) -> Result<Self> {
        if n_points < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least 2 points, got {n_points}"
            )));
        }
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "grid width must be positive, got {width}"
            )));
        }

        let dx = width / n_points as f64;
        let half = n_points / 2;
        let positions = (0..n_points)
            .map(|j| (j as f64 - half as f64) * dx)
            .collect();
        let dk = 2.0 * PI / width;
        let wavenumbers = (0..n_points)
            .map(|j| {
                if j < n_points.div_ceil(2) {
                    j as f64 * dk
                } else {
                    (j as f64 - n_points as f64) * dk
                }
            })
            .collect();

        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n_points);
        let inverse = planner.plan_fft_inverse(n_points);

        Ok(Self {
            n_points,
            width,
            dx,
            positions,
            wavenumbers,
            forward,
            inverse,
        })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Centred sample positions (m).
    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    /// Wavenumbers in FFT index order (1/m).
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// Index of `x = 0`.
    pub fn center_index(&self) -> usize {
        self.n_points / 2
    }

    /// `π/dx`.
    pub fn nyquist(&self) -> f64 {
        PI / self.dx
    }

    /// Index of the sample mirrored through `x = 0`, treating the window as periodic.
    pub fn mirror_index(&self, j: usize) -> usize {
        (2 * self.center_index() + self.n_points - j) % self.n_points
    }

    pub fn scratch_len(&self) -> usize {
        self.forward
            .get_inplace_scratch_len()
            .max(self.inverse.get_inplace_scratch_len())
    }

    /// In-place unnormalized forward transform.
    pub fn forward(&self, buf: &mut [Complex64]) {
        self.forward.process(buf);
    }

    /// In-place inverse transform, normalized by `1/n`.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.inverse.process(buf);
        self.normalize(buf);
    }

    pub fn forward_with_scratch(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        self.forward.process_with_scratch(buf, scratch);
    }

    pub fn inverse_with_scratch(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        self.inverse.process_with_scratch(buf, scratch);
        self.normalize(buf);
    }

    fn normalize(&self, buf: &mut [Complex64]) {
        let scale = 1.0 / self.n_points as f64;
        for v in buf.iter_mut() {
            *v *= scale;
        }
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n_points", &self.n_points)
            .field("width", &self.width)
            .field("dx", &self.dx)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n_points == other.n_points && self.width.to_bits() == other.width.to_bits()
    }
}

/// Builds a shared grid; fields hold it by `Arc`.
pub fn make_grid(n_points: usize, width: f64) -> Result<Arc<Grid>> {
    Grid::new(n_points, width).map(Arc::new)
}
