//! One-dimensional fluid-of-light simulations: split-step propagation of a
//! pump and weak probe through a defocusing Kerr medium, and the
//! group-velocity protocol that recovers the Bogoliubov dispersion from the
//! output envelopes.

// `!(x > 0.0)` style checks deliberately reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiment;
pub mod field;
pub mod fitting;
pub mod grid;
pub mod io;
pub mod medium;
pub mod ssfm;

pub use error::{Error, Result};
pub use experiment::{
    analytic_dispersion_curve, dispersion_from_envelopes, measure_separation, phase_scan_envelope, reconstruct_dispersion,
    run_dispersion_scan, run_sound_speed_scan, synthesize_input, DispersionCurve, DispersionSample,
    Envelope, FilterPolicy, MeasureMode, Measurement, ProbeSpec, PumpSpec, SoundSpeedScan,
};
pub use field::{madelung_decompose, total_power, ComplexField, MadelungFields};
pub use grid::{make_grid, Grid};
pub use io::config::{load_config, ExperimentConfig, KScan};
pub use medium::{
    bogoliubov_group_velocity, bogoliubov_omega, delta_n, healing_length, landau_critical_speed,
    sound_speed_angle, BogoliubovParams, MediumSpec,
};
pub use rustfft::num_complex::Complex64;
pub use ssfm::{propagate, PropagationPlan, Propagator, Sponge, Trajectory};
