//! Plain-text tables with byte-stable float formatting.
//!
//! Floats are written in scientific notation from their shortest
//! round-trip digits, zero-padded to 17 significant digits, so output is
//! exact, fixed-width and independent of locale.

use std::fmt::Write;

use crate::experiment::{DispersionCurve, Envelope, SoundSpeedScan};

pub const CURVE_HEADER: &str = "k_per_m,v_g_rad,mode,D_m,omega_recon_per_m,omega_analytic_per_m";
pub const SOUND_SPEED_HEADER: &str = "intensity_W_per_m2,c_s_rad,c_s_analytic_rad";
pub const ENVELOPE_HEADER: &str = "k_per_m,x_m,envelope_W_per_m2";

pub fn format_float(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let shortest = format!("{v:e}");
    let (mantissa, exponent) = shortest.split_once('e').unwrap_or((&shortest, "0"));
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    format!("{int}.{frac:0<16}e{exponent}")
}

pub fn write_curve_csv(curve: &DispersionCurve) -> String {
    let mut out = String::from(CURVE_HEADER);
    out.push('\n');
    for s in &curve.samples {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            format_float(s.k_perp),
            format_float(s.v_g),
            s.mode.as_str(),
            format_float(s.separation),
            format_float(s.omega_reconstructed),
            format_float(s.omega_analytic)
        );
    }
    out
}

pub fn write_sound_speed_csv(scan: &SoundSpeedScan) -> String {
    let mut out = String::from(SOUND_SPEED_HEADER);
    out.push('\n');
    for s in &scan.samples {
        let _ = writeln!(
            out,
            "{},{},{}",
            format_float(s.intensity),
            format_float(s.c_s),
            format_float(s.c_s_analytic)
        );
    }
    out
}

/// `key = value` lines with the power-law fit and any failed points.
pub fn write_sound_speed_summary(scan: &SoundSpeedScan) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "exponent = {}", format_float(scan.exponent));
    let _ = writeln!(out, "prefactor = {}", format_float(scan.prefactor));
    let _ = writeln!(out, "points = {}", scan.samples.len());
    for f in &scan.failures {
        let _ = writeln!(out, "failed = {} ({})", format_float(f.at), f.reason);
    }
    out
}

/// Long-form envelope map, one row per `(k⊥, x)`.
pub fn write_envelope_map_csv(envelopes: &[Envelope]) -> String {
    let mut out = String::from(ENVELOPE_HEADER);
    out.push('\n');
    for env in envelopes {
        let k = format_float(env.k_perp);
        for (x, v) in env.grid.positions().iter().zip(&env.values) {
            let _ = writeln!(out, "{k},{},{}", format_float(*x), format_float(*v));
        }
    }
    out
}
