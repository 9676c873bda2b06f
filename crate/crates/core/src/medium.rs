//! Kerr medium parameters and closed-form Bogoliubov quantities.
//!
//! Frequencies are reported per unit propagation length (the factor `c` is
//! dropped), and velocities as dimensionless transverse angles. With
//! `g = |Δn|` the excitation spectrum of a uniform fluid is
//!
//! ```text
//! Ω(k)   = √(g·k² + (k²/2k₀)²)                      [1/m]
//! v_g(k) = dΩ/dk = (g + k²/2k₀²) / √(g + k²/4k₀²)   [rad]
//! ```
//!
//! All formulas use `|Δn|`; a focusing medium (`Δn > 0`) is modulationally
//! unstable and these expressions do not describe it.

use std::f64::consts::PI;

use log::warn;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumSpec {
    lambda0: f64,
    n2: f64,
    alpha: f64,
    length: f64,
    k0: f64,
}

impl MediumSpec {
    /// `lambda0` (m), signed `n2` (m²/W, negative is defocusing), `alpha`
    /// (1/m), `length` (m).
    pub fn new(lambda0: f64, n2: f64, alpha: f64, length: f64) -> Result<Self> {
        if !(lambda0.is_finite() && lambda0 > 0.0) {
            return Err(Error::InvalidArgument(format!("lambda0 must be positive, got {lambda0}")));
        }
        if !n2.is_finite() {
            return Err(Error::InvalidArgument(format!("n2 must be finite, got {n2}")));
        }
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::InvalidArgument(format!("alpha must be >= 0, got {alpha}")));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidArgument(format!("length must be positive, got {length}")));
        }
        Ok(Self {
            lambda0,
            n2,
            alpha,
            length,
            k0: 2.0 * PI / lambda0,
        })
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    pub fn n2(&self) -> f64 {
        self.n2
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    pub fn with_n2(self, n2: f64) -> Result<Self> {
        Self::new(self.lambda0, n2, self.alpha, self.length)
    }

    pub fn with_alpha(self, alpha: f64) -> Result<Self> {
        Self::new(self.lambda0, self.n2, alpha, self.length)
    }

    /// Bogoliubov parameters of a uniform fluid of the given intensity.
    pub fn bogoliubov(&self, intensity: f64) -> Result<BogoliubovParams> {
        Ok(BogoliubovParams::new(delta_n(self, intensity)?, self.k0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogoliubovParams {
    /// Signed `n₂·I`.
    pub delta_n: f64,
    pub k0: f64,
}

impl BogoliubovParams {
    pub fn new(delta_n: f64, k0: f64) -> Self {
        if delta_n > 0.0 {
            warn!(
                "delta_n = {delta_n:e} > 0: focusing medium, the Bogoliubov spectrum assumes \
                 repulsive interactions (modulational instability)"
            );
        }
        Self { delta_n, k0 }
    }

    pub fn abs_delta_n(&self) -> f64 {
        self.delta_n.abs()
    }

    pub fn healing_length(&self) -> Result<f64> {
        healing_length(2.0 * PI / self.k0, self.delta_n)
    }
}

/// Nonlinear index `n₂·I` (signed).
pub fn delta_n(medium: &MediumSpec, intensity: f64) -> Result<f64> {
    if !(intensity.is_finite() && intensity >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "intensity must be >= 0, got {intensity}"
        )));
    }
    Ok(medium.n2 * intensity)
}

/// `ξ = (λ₀/2)/√|Δn|`.
pub fn healing_length(lambda0: f64, delta_n: f64) -> Result<f64> {
    if delta_n == 0.0 || !delta_n.is_finite() {
        return Err(Error::SingularInput(format!(
            "healing length undefined for delta_n = {delta_n}"
        )));
    }
    Ok(0.5 * lambda0 / delta_n.abs().sqrt())
}

/// Sound speed as a transverse angle, `√|Δn|`.
pub fn sound_speed_angle(delta_n: f64) -> f64 {
    delta_n.abs().sqrt()
}

/// `Ω(k)`, extended as an odd function to `k < 0`.
pub fn bogoliubov_omega(k: f64, params: &BogoliubovParams) -> f64 {
    let q = k.abs();
    let omega = q * (params.abs_delta_n() + q * q / (4.0 * params.k0 * params.k0)).sqrt();
    omega.copysign(k)
}

/// `dΩ/dk`, even in `k`, with `v_g(0) = √|Δn|`.
pub fn bogoliubov_group_velocity(k: f64, params: &BogoliubovParams) -> f64 {
    let g = params.abs_delta_n();
    let k0sq = params.k0 * params.k0;
    let q2 = k * k;
    let denom = (g + q2 / (4.0 * k0sq)).sqrt();
    if denom == 0.0 {
        return 0.0;
    }
    (g + q2 / (2.0 * k0sq)) / denom
}

/// Landau critical speed `min_k Ω(k)/k`.
///
/// `Ω/k = √(|Δn| + k²/4k₀²)` grows with `k`, so the infimum is the `k → 0`
/// limit and coincides with the sound speed.
pub fn landau_critical_speed(params: &BogoliubovParams) -> f64 {
    sound_speed_angle(params.delta_n)
}
