//! Second-order (Strang) split-step Fourier integration of the paraxial
//! nonlinear Schrödinger equation in one transverse dimension,
//!
//! ```text
//! i ∂E/∂z = -(1/2k₀) ∂²E/∂x² - (k₀ n₂ |E|² + i α/2) E
//! ```
//!
//! Each step is half a linear (diffraction) step in Fourier space, a full
//! pointwise nonlinear step, and another linear half step. Consecutive
//! linear halves between output points are fused into one full step, which
//! is algebraically the same composition with half the transforms.
//!
//! The window is periodic. An optional super-Gaussian sponge damps the
//! field near the edges.

use std::sync::Arc;

use log::warn;
use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::grid::Grid;
use crate::medium::MediumSpec;

/// Absorbing layer at the window edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sponge {
    /// Width of each edge layer (m).
    pub width: f64,
    /// Peak damping rate of the field amplitude (1/m).
    pub strength: f64,
}

impl Sponge {
    /// Damping-rate profile: ~0 in the interior, rising smoothly to
    /// `strength` over the outer `width` on each side.
    fn rate_profile(&self, grid: &Grid) -> Vec<f64> {
        let inner = (0.5 * grid.width() - self.width).max(grid.dx());
        grid.positions()
            .iter()
            .map(|&x| self.strength * (1.0 - (-(x / inner).powi(16)).exp()))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationPlan {
    pub z_span: f64,
    pub n_steps: usize,
    /// Record a snapshot every this many steps; 0 keeps only the final field.
    pub snapshot_stride: usize,
    pub sponge: Option<Sponge>,
}

impl PropagationPlan {
    pub fn new(z_span: f64, n_steps: usize) -> Result<Self> {
        let plan = Self {
            z_span,
            n_steps,
            snapshot_stride: 0,
            sponge: None,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn with_snapshots(mut self, stride: usize) -> Self {
        self.snapshot_stride = stride;
        self
    }

    pub fn with_sponge(mut self, sponge: Sponge) -> Self {
        self.sponge = Some(sponge);
        self
    }

    pub fn dz(&self) -> f64 {
        self.z_span / self.n_steps as f64
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.z_span.is_finite() && self.z_span > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "z_span must be positive, got {}",
                self.z_span
            )));
        }
        if self.n_steps == 0 {
            return Err(Error::InvalidArgument("n_steps must be >= 1".into()));
        }
        if let Some(s) = self.sponge {
            if !(s.width >= 0.0 && s.strength >= 0.0) {
                return Err(Error::InvalidArgument("sponge width and strength must be >= 0".into()));
            }
        }
        Ok(())
    }

    /// Nonlinear length `1/(k₀|n₂|I_max)`.
    pub fn nonlinear_length(medium: &MediumSpec, peak_intensity: f64) -> f64 {
        1.0 / (medium.k0() * (medium.n2() * peak_intensity).abs())
    }

    /// Warns when `dz` exceeds a twentieth of the nonlinear length.
    pub fn check_resolution(&self, medium: &MediumSpec, peak_intensity: f64) -> bool {
        let z_nl = Self::nonlinear_length(medium, peak_intensity);
        let ok = self.dz() <= z_nl / 20.0;
        if !ok {
            warn!(
                "dz = {:e} m exceeds z_NL/20 = {:e} m; expect splitting error",
                self.dz(),
                z_nl / 20.0
            );
        }
        ok
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<ComplexField>,
    pub final_field: ComplexField,
}

impl Trajectory {
    pub fn z_values(&self) -> Vec<f64> {
        self.snapshots.iter().map(|f| f.z()).collect()
    }
}

fn diffraction_multiplier(grid: &Grid, k0: f64, dz: f64) -> Vec<Complex64> {
    grid.wavenumbers()
        .iter()
        .map(|&k| Complex64::from_polar(1.0, -k * k * dz / (2.0 * k0)))
        .collect()
}

/// Applies the linear propagator for `dz/2`: `Ê(k) → Ê(k)·exp(-i k² (dz/2) / 2k₀)`.
pub fn linear_half_step(field: &ComplexField, medium: &MediumSpec, dz: f64) -> ComplexField {
    let grid = field.grid();
    let mult = diffraction_multiplier(grid, medium.k0(), 0.5 * dz);
    let mut buf = field.samples().to_vec();
    grid.forward(&mut buf);
    for (v, m) in buf.iter_mut().zip(&mult) {
        *v *= m;
    }
    grid.inverse(&mut buf);
    ComplexField::from_parts_unchecked(grid.clone(), buf, field.z())
}

/// Pointwise `E → E·exp(i k₀ n₂ |E|² dz)·exp(-α dz/2)`.
pub fn nonlinear_step(field: &ComplexField, medium: &MediumSpec, dz: f64) -> ComplexField {
    let mut buf = field.samples().to_vec();
    apply_nonlinear(&mut buf, medium.k0() * medium.n2() * dz, (-0.5 * medium.alpha() * dz).exp());
    ComplexField::from_parts_unchecked(field.grid().clone(), buf, field.z())
}

#[inline]
fn apply_nonlinear(buf: &mut [Complex64], phase_per_intensity: f64, decay: f64) {
    for v in buf.iter_mut() {
        let rot = Complex64::from_polar(decay, phase_per_intensity * v.norm_sqr());
        *v *= rot;
    }
}

/// Reusable integrator for one grid, medium and plan.
///
/// Holds precomputed multipliers and FFT scratch so that repeated runs
/// (phase scans) do not reallocate.
pub struct Propagator {
    grid: Arc<Grid>,
    medium: MediumSpec,
    plan: PropagationPlan,
    half: Vec<Complex64>,
    full: Vec<Complex64>,
    sponge_mask: Option<Vec<f64>>,
    scratch: Vec<Complex64>,
}

impl Propagator {
    pub fn new(grid: Arc<Grid>, medium: MediumSpec, plan: PropagationPlan) -> Result<Self> {
        plan.validate()?;
        let dz = plan.dz();
        let half = diffraction_multiplier(&grid, medium.k0(), 0.5 * dz);
        let full = diffraction_multiplier(&grid, medium.k0(), dz);
        let sponge_mask = plan.sponge.map(|s| {
            s.rate_profile(&grid)
                .into_iter()
                .map(|r| (-r * dz).exp())
                .collect()
        });
        let scratch = vec![Complex64::new(0.0, 0.0); grid.scratch_len()];
        Ok(Self {
            grid,
            medium,
            plan,
            half,
            full,
            sponge_mask,
            scratch,
        })
    }

    pub fn plan(&self) -> &PropagationPlan {
        &self.plan
    }

    pub fn medium(&self) -> &MediumSpec {
        &self.medium
    }

    fn linear(&mut self, buf: &mut [Complex64], fused: bool) {
        self.grid.forward_with_scratch(buf, &mut self.scratch);
        let mult = if fused { &self.full } else { &self.half };
        for (v, m) in buf.iter_mut().zip(mult) {
            *v *= m;
        }
        self.grid.inverse_with_scratch(buf, &mut self.scratch);
    }

    pub fn run(&mut self, input: &ComplexField) -> Result<Trajectory> {
        if **input.grid() != *self.grid {
            return Err(Error::InvalidArgument("input field is on a different grid".into()));
        }
        let n = self.plan.n_steps;
        let stride = self.plan.snapshot_stride;
        let dz = self.plan.dz();
        let z0 = input.z();
        let kphase = self.medium.k0() * self.medium.n2() * dz;
        let decay = (-0.5 * self.medium.alpha() * dz).exp();

        let mut snapshots = Vec::new();
        if stride > 0 {
            snapshots.push(input.clone());
        }

        let mut buf = input.samples().to_vec();
        // the first linear half step is never fused
        let mut pending_half = true;
        for step in 1..=n {
            if pending_half {
                self.linear(&mut buf, false);
            }
            apply_nonlinear(&mut buf, kphase, decay);
            if let Some(mask) = &self.sponge_mask {
                for (v, m) in buf.iter_mut().zip(mask) {
                    *v *= m;
                }
            }

            let record = step == n || (stride > 0 && step % stride == 0);
            if record {
                self.linear(&mut buf, false);
                pending_half = true;
            } else {
                self.linear(&mut buf, true);
                pending_half = false;
            }

            let z = if step == n {
                z0 + self.plan.z_span
            } else {
                z0 + step as f64 * dz
            };
            if buf.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
                return Err(Error::NumericalBlowup { step, z });
            }
            if stride > 0 && step % stride == 0 {
                snapshots.push(ComplexField::from_parts_unchecked(self.grid.clone(), buf.clone(), z));
            }
        }

        let final_field = ComplexField::from_parts_unchecked(self.grid.clone(), buf, z0 + self.plan.z_span);
        Ok(Trajectory {
            snapshots,
            final_field,
        })
    }
}

/// Integrates `field` over `plan.z_span`.
pub fn propagate(field: &ComplexField, medium: &MediumSpec, plan: &PropagationPlan) -> Result<Trajectory> {
    let peak = field.samples().iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
    if medium.n2() != 0.0 && peak > 0.0 {
        plan.check_resolution(medium, peak);
    }
    Propagator::new(field.grid().clone(), *medium, plan.clone())?.run(field)
}
