use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::info;

use photon_fluid::io::csv::{write_curve_csv, write_sound_speed_csv, write_sound_speed_summary};
use photon_fluid::io::presets::{run_preset, Preset};
use photon_fluid::io::snapshot::write_snapshot_file;
use photon_fluid::{
    analytic_dispersion_curve, load_config, run_dispersion_scan, run_sound_speed_scan,
    synthesize_input, total_power, BogoliubovParams, Error, ExperimentConfig, Propagator, Result,
};

/// Fluid-of-light simulations and Bogoliubov dispersion measurements.
#[derive(Parser)]
#[command(name = "photon-fluid", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate the configured pump and probe and write field snapshots.
    Propagate {
        #[arg(long)]
        config: PathBuf,
        /// Number of evenly spaced snapshots besides the input.
        #[arg(long, default_value_t = 0)]
        snapshots: usize,
        /// Output directory; defaults to `[output] dir`, then `.`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form dispersion integrated from the analytic group velocity.
    Analytic {
        /// Magnitude of the nonlinear index change.
        #[arg(long, allow_hyphen_values = true)]
        delta_n: f64,
        /// Largest wavevector (1/m).
        #[arg(long)]
        k_max: f64,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 780e-9)]
        lambda0: f64,
        /// Cell length (m), used for the separation column.
        #[arg(long, default_value_t = 0.075)]
        length: f64,
    },
    /// Measure v_g at every configured k and reconstruct the dispersion.
    Dispersion {
        #[arg(long)]
        config: PathBuf,
        /// Write `dispersion.csv` here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measure the sound speed at every configured intensity.
    SoundSpeed {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a built-in parameter set and write its data files.
    Preset {
        /// fig2, fig3 or fig4.
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn read_config(path: &Path) -> Result<ExperimentConfig> {
    load_config(&fs::read_to_string(path)?)
}

fn output_dir(explicit: Option<PathBuf>, config: &ExperimentConfig) -> Option<PathBuf> {
    explicit.or_else(|| config.output_dir.clone())
}

fn emit(dir: Option<&Path>, name: &str, text: &str) -> Result<()> {
    match dir {
        Some(d) => {
            fs::create_dir_all(d)?;
            let path = d.join(name);
            fs::write(&path, text)?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Propagate { config, snapshots, out } => {
            let cfg = read_config(&config)?;
            let dir = output_dir(out, &cfg).unwrap_or_else(|| PathBuf::from("."));
            fs::create_dir_all(&dir)?;
            let grid = cfg.grid()?;
            let input = synthesize_input(&grid, &cfg.pump, &cfg.probe)?;
            let stride = match snapshots {
                0 => cfg.plan.snapshot_stride,
                n => (cfg.plan.n_steps / n).max(1),
            };
            let plan = cfg.plan.clone().with_snapshots(stride);
            let p0 = total_power(&input);
            let traj = Propagator::new(grid, cfg.medium, plan)?.run(&input)?;
            let fields = if traj.snapshots.is_empty() {
                vec![input, traj.final_field]
            } else {
                traj.snapshots
            };
            for (i, f) in fields.iter().enumerate() {
                let path = dir.join(format!("snapshot_{i:04}.pfl"));
                write_snapshot_file(&path, f, cfg.medium.lambda0())?;
                info!("wrote {} (z = {:e} m)", path.display(), f.z());
            }
            let last = fields.last().expect("at least two fields");
            println!(
                "wrote {} snapshots to {}; z = {:e} m, power {:e} -> {:e} W/m",
                fields.len(),
                dir.display(),
                last.z(),
                p0,
                total_power(last)
            );
        }
        Command::Analytic {
            delta_n,
            k_max,
            samples,
            lambda0,
            length,
        } => {
            if !(delta_n != 0.0 && delta_n.is_finite()) {
                return Err(Error::InvalidArgument("--delta-n must be non-zero".into()));
            }
            if !(k_max > 0.0 && k_max.is_finite()) || samples < 2 {
                return Err(Error::InvalidArgument(
                    "--k-max must be positive and --samples at least 2".into(),
                ));
            }
            if !(lambda0 > 0.0 && length > 0.0) {
                return Err(Error::InvalidArgument("--lambda0 and --length must be positive".into()));
            }
            let params = BogoliubovParams::new(-delta_n.abs(), 2.0 * std::f64::consts::PI / lambda0);
            let ks: Vec<f64> = (0..samples)
                .map(|i| k_max * i as f64 / (samples - 1) as f64)
                .collect();
            let curve = analytic_dispersion_curve(&params, length, &ks)?;
            print!("{}", write_curve_csv(&curve));
        }
        Command::Dispersion { config, out } => {
            let cfg = read_config(&config)?;
            let curve = run_dispersion_scan(&cfg)?;
            for f in &curve.failures {
                eprintln!("k = {:e} 1/m failed: {}", f.at, f.reason);
            }
            emit(output_dir(out, &cfg).as_deref(), "dispersion.csv", &write_curve_csv(&curve))?;
        }
        Command::SoundSpeed { config, out } => {
            let cfg = read_config(&config)?;
            let scan = run_sound_speed_scan(&cfg, &cfg.intensities)?;
            let dir = output_dir(out, &cfg);
            emit(dir.as_deref(), "sound_speed.csv", &write_sound_speed_csv(&scan))?;
            emit(dir.as_deref(), "sound_speed_summary.txt", &write_sound_speed_summary(&scan))?;
        }
        Command::Preset { name, out } => {
            let preset: Preset = name.parse()?;
            for path in run_preset(preset, &out)? {
                println!("{}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
