//! Built-in parameter sets: an envelope map (`fig2`), a dispersion scan
//! (`fig3`) and a sound-speed scan (`fig4`).

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::info;

use crate::error::{Error, Result};
use crate::experiment::{dispersion_from_envelopes, phase_scan_envelope, run_dispersion_scan, run_sound_speed_scan};
use crate::io::config::{load_config, ExperimentConfig};
use crate::io::csv::{write_curve_csv, write_envelope_map_csv, write_sound_speed_csv, write_sound_speed_summary};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Envelopes versus `k⊥` at `Δn = 1.3e-5`.
    Fig2,
    /// Group velocity and reconstructed dispersion at `Δn = 3.9e-6`.
    Fig3,
    /// Sound speed versus pump intensity.
    Fig4,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig2" => Ok(Preset::Fig2),
            "fig3" => Ok(Preset::Fig3),
            "fig4" => Ok(Preset::Fig4),
            other => Err(Error::InvalidArgument(format!(
                "unknown preset `{other}`, expected fig2, fig3 or fig4"
            ))),
        }
    }
}

const COMMON: &str = "
[medium]
lambda0 = 780e-9 m
n2 = -3.1e-11 m2/W
alpha = 0 1/m
length = 0.075 m

[probe]
amplitude = 0.1
waist = 180e-6 m

[grid]
n_points = 4096
width = 8.192e-3 m

[propagation]
n_steps = 1000
";

const FIG2: &str = "
[pump]
delta_n_target = 1.3e-5

[scan]
k_max = 1e5 1/m
n_k = 11
n_phase = 40
";

const FIG3: &str = "
[pump]
delta_n_target = 3.9e-6

[scan]
k_values = 0, 2.5e3, 5e3, 7.5e3, 1e4, 1.25e4, 1.5e4, 1.75e4, 2e4, 2.5e4, 3e4, 4e4, 5e4, 6e4, 8e4, 1e5, 1.2e5, 1.4e5, 1.6e5 1/m
n_phase = 40
";

// one decade geometrically centred on the fig3 pump, 1.258e5 W/m2
const FIG4: &str = "
[pump]
intensity = 1.258e5 W/m2

[scan]
intensities = 3.978e4, 7.074e4, 1.258e5, 2.237e5, 3.978e5 W/m2
n_phase = 40
";

impl Preset {
    pub fn name(&self) -> &'static str {
        match self {
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
        }
    }

    /// Full configuration text.
    pub fn text(&self) -> String {
        let specific = match self {
            Preset::Fig2 => FIG2,
            Preset::Fig3 => FIG3,
            Preset::Fig4 => FIG4,
        };
        format!("# preset {}\n{COMMON}{specific}", self.name())
    }

    pub fn config(&self) -> Result<ExperimentConfig> {
        load_config(&self.text())
    }
}

fn write(dir: &Path, name: &str, contents: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents)?;
    info!("wrote {}", path.display());
    written.push(path);
    Ok(())
}

/// Runs a preset and writes its data files into `out`, returning their paths.
///
/// `fig2` writes `envelope_map.csv` and `dispersion.csv`, `fig3` writes
/// `dispersion.csv`, and `fig4` writes `sound_speed.csv` and
/// `sound_speed_summary.txt`. Each also writes the `config.txt` it ran.
pub fn run_preset(preset: Preset, out: &Path) -> Result<Vec<PathBuf>> {
    run_config(preset, &preset.config()?, out)
}

/// As [`run_preset`] with an explicit configuration, e.g. a reduced grid.
pub fn run_config(preset: Preset, config: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out)?;
    let mut written = Vec::new();
    write(out, "config.txt", &preset.text(), &mut written)?;
    match preset {
        Preset::Fig2 => {
            let envelopes = config
                .k_values()
                .into_iter()
                .map(|k| phase_scan_envelope(config, k))
                .collect::<Result<Vec<_>>>()?;
            write(out, "envelope_map.csv", &write_envelope_map_csv(&envelopes), &mut written)?;
            let curve = dispersion_from_envelopes(config, &envelopes)?;
            write(out, "dispersion.csv", &write_curve_csv(&curve), &mut written)?;
        }
        Preset::Fig3 => {
            let curve = run_dispersion_scan(config)?;
            write(out, "dispersion.csv", &write_curve_csv(&curve), &mut written)?;
        }
        Preset::Fig4 => {
            let scan = run_sound_speed_scan(config, &config.intensities)?;
            write(out, "sound_speed.csv", &write_sound_speed_csv(&scan), &mut written)?;
            write(out, "sound_speed_summary.txt", &write_sound_speed_summary(&scan), &mut written)?;
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse() {
        let f2 = Preset::Fig2.config().unwrap();
        assert!((f2.bogoliubov().unwrap().delta_n + 1.3e-5).abs() < 1e-18);
        assert_eq!(f2.k_values().len(), 11);
        let f3 = Preset::Fig3.config().unwrap();
        assert!((f3.bogoliubov().unwrap().delta_n + 3.9e-6).abs() < 1e-18);
        assert_eq!(f3.k_values()[0], 0.0);
        let f4 = Preset::Fig4.config().unwrap();
        let i = &f4.intensities;
        assert!((i[i.len() - 1] / i[0] - 10.0).abs() < 1e-2);
    }

    #[test]
    fn unknown_preset() {
        assert!("fig5".parse::<Preset>().is_err());
        assert_eq!("fig3".parse::<Preset>().unwrap(), Preset::Fig3);
    }
}
