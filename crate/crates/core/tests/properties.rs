mod support;

#[test]
fn fft_round_trip() {
    support::fft_round_trip().unwrap();
}

#[test]
fn spectral_ramp_translates() {
    support::spectral_ramp_translates().unwrap();
}

#[test]
fn madelung_recomposes() {
    support::madelung_recomposes().unwrap();
}

#[test]
fn power_is_conserved() {
    support::power_is_conserved().unwrap();
}

#[test]
fn nonlinear_step_keeps_modulus() {
    support::nonlinear_step_keeps_modulus().unwrap();
}

#[test]
fn gaussian_fit_is_covariant() {
    support::gaussian_fit_is_covariant().unwrap();
}

#[test]
fn two_gaussian_separation_scales() {
    support::two_gaussian_separation_scales().unwrap();
}

#[test]
fn peaks_mirror() {
    support::peaks_mirror().unwrap();
}

#[test]
fn power_law_recovery() {
    support::power_law_recovery().unwrap();
}

#[test]
fn dispersion_symmetries() {
    support::dispersion_symmetries().unwrap();
}

#[test]
fn analytic_bypass_quadrature() {
    support::analytic_bypass_quadrature().unwrap();
}

#[test]
fn reconstruction_is_monotone() {
    support::reconstruction_is_monotone().unwrap();
}

#[test]
fn config_parsing_is_total() {
    support::config_parsing_is_total().unwrap();
}

#[test]
fn snapshot_round_trip() {
    support::snapshot_round_trip().unwrap();
}

#[test]
fn snapshot_reader_is_total() {
    support::snapshot_reader_is_total().unwrap();
}

#[test]
fn float_format_round_trips() {
    support::float_format_round_trips().unwrap();
}
