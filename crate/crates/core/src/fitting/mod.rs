//! Least-squares fits and signal conditioning for envelope measurements.

mod gaussian;
pub mod lm;
mod signal;

pub use gaussian::{fit_gaussian, fit_two_gaussian, GaussianModel, TwoGaussianFit};
pub use signal::{
    find_peaks, fit_power_law, half_max_width, lowpass_filter, median, PeakLocation, PowerLaw,
};
