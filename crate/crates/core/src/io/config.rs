//! Experiment configuration in a flat sectioned `key = value [unit]` format.
//!
//! ```text
//! # the fig2 preset, without its scan
//! [medium]
//! lambda0 = 780e-9 m
//! n2 = -3.1e-11 m2/W
//! length = 0.075 m
//!
//! [pump]
//! delta_n_target = 1.3e-5
//!
//! [probe]
//! waist = 180e-6 m
//!
//! [grid]
//! n_points = 4096
//! width = 8.192e-3 m
//! ```
//!
//! Units are optional; when present they must match the documented one.
//! Lists are comma separated. Unknown sections and keys are rejected.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::experiment::{FilterPolicy, ProbeSpec, PumpSpec};
use crate::grid::{make_grid, Grid};
use crate::medium::{BogoliubovParams, MediumSpec};
use crate::ssfm::{PropagationPlan, Sponge};

/// Probe wavevectors to scan.
#[derive(Debug, Clone, PartialEq)]
pub enum KScan {
    List(Vec<f64>),
    /// `n` values evenly spaced over `[0, k_max]`.
    Uniform { k_max: f64, n: usize },
}

impl KScan {
    pub fn values(&self) -> Vec<f64> {
        match self {
            KScan::List(v) => v.clone(),
            KScan::Uniform { k_max, n } => (0..*n)
                .map(|i| k_max * i as f64 / (*n - 1).max(1) as f64)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub medium: MediumSpec,
    pub n_points: usize,
    /// m.
    pub width: f64,
    pub pump: PumpSpec,
    /// Defaults for the probe; scans override `k_perp` and `phase`.
    pub probe: ProbeSpec,
    pub plan: PropagationPlan,
    pub scan: KScan,
    /// W/m², for sound-speed scans.
    pub intensities: Vec<f64>,
    pub n_phase: usize,
    pub filter: FilterPolicy,
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    /// A configuration with default propagation (1000 steps over the cell),
    /// 40 phases, automatic filtering and an empty scan.
    pub fn new(medium: MediumSpec, n_points: usize, width: f64, pump: PumpSpec, probe: ProbeSpec) -> Result<Self> {
        Ok(Self {
            medium,
            n_points,
            width,
            pump,
            probe,
            plan: PropagationPlan::new(medium.length(), 1000)?,
            scan: KScan::List(Vec::new()),
            intensities: Vec::new(),
            n_phase: 40,
            filter: FilterPolicy::Auto,
            output_dir: None,
        })
    }

    pub fn grid(&self) -> Result<Arc<Grid>> {
        make_grid(self.n_points, self.width)
    }

    pub fn k_values(&self) -> Vec<f64> {
        self.scan.values()
    }

    pub fn bogoliubov(&self) -> Result<BogoliubovParams> {
        self.medium.bogoliubov(self.pump.intensity)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Unit {
    None,
    Meter,
    AreaPerWatt,
    PerMeter,
    Intensity,
    Radian,
}

impl Unit {
    fn accepts(self, text: &str) -> bool {
        match self {
            Unit::None => false,
            Unit::Meter => text == "m",
            Unit::AreaPerWatt => matches!(text, "m2/W" | "m^2/W"),
            Unit::PerMeter => matches!(text, "1/m" | "m^-1"),
            Unit::Intensity => matches!(text, "W/m2" | "W/m^2"),
            Unit::Radian => text == "rad",
        }
    }

    fn name(self) -> &'static str {
        match self {
            Unit::None => "no unit",
            Unit::Meter => "m",
            Unit::AreaPerWatt => "m2/W",
            Unit::PerMeter => "1/m",
            Unit::Intensity => "W/m2",
            Unit::Radian => "rad",
        }
    }
}

const SCHEMA: &[(&str, &str, Unit)] = &[
    ("medium", "lambda0", Unit::Meter),
    ("medium", "n2", Unit::AreaPerWatt),
    ("medium", "alpha", Unit::PerMeter),
    ("medium", "length", Unit::Meter),
    ("pump", "intensity", Unit::Intensity),
    ("pump", "delta_n_target", Unit::None),
    ("probe", "amplitude", Unit::None),
    ("probe", "waist", Unit::Meter),
    ("probe", "k_perp", Unit::PerMeter),
    ("probe", "phase", Unit::Radian),
    ("grid", "n_points", Unit::None),
    ("grid", "width", Unit::Meter),
    ("propagation", "n_steps", Unit::None),
    ("propagation", "snapshot_stride", Unit::None),
    ("propagation", "sponge_width", Unit::Meter),
    ("propagation", "sponge_strength", Unit::PerMeter),
    ("scan", "k_values", Unit::PerMeter),
    ("scan", "k_max", Unit::PerMeter),
    ("scan", "n_k", Unit::None),
    ("scan", "n_phase", Unit::None),
    ("scan", "filter", Unit::PerMeter),
    ("scan", "intensities", Unit::Intensity),
    ("output", "dir", Unit::None),
];

struct Entry {
    line: usize,
    value: String,
    unit: Unit,
}

struct Table {
    entries: BTreeMap<String, Entry>,
}

fn parse_error(line: usize, key: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        key: key.to_string(),
        message: message.into(),
    }
}

impl Table {
    fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| parse_error(line, content, "unterminated section header"))?
                    .trim();
                if !SCHEMA.iter().any(|(s, _, _)| *s == name) {
                    return Err(parse_error(line, name, "unknown section"));
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| parse_error(line, content, "expected `key = value`"))?;
            let key = key.trim();
            let Some(sec) = &section else {
                return Err(parse_error(line, key, "key outside of any section"));
            };
            let full = format!("{sec}.{key}");
            let unit = SCHEMA
                .iter()
                .find(|(s, k, _)| s == sec && *k == key)
                .map(|(_, _, u)| *u)
                .ok_or_else(|| parse_error(line, &full, "unknown key"))?;
            let value = value.trim();
            if value.is_empty() {
                return Err(parse_error(line, &full, "empty value"));
            }
            if entries.contains_key(&full) {
                return Err(parse_error(line, &full, "duplicate key"));
            }
            entries.insert(
                full,
                Entry {
                    line,
                    value: value.to_string(),
                    unit,
                },
            );
        }
        Ok(Self { entries })
    }

    fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn line(&self, key: &str) -> usize {
        self.entries.get(key).map_or(0, |e| e.line)
    }

    /// Splits `number [unit]` and checks the unit.
    fn split_unit<'a>(&self, key: &str, entry: &Entry, item: &'a str) -> Result<&'a str> {
        let mut parts = item.split_whitespace();
        let number = parts.next().unwrap_or("");
        if let Some(unit) = parts.next() {
            if parts.next().is_some() {
                return Err(parse_error(entry.line, key, format!("unexpected text after `{unit}`")));
            }
            if !entry.unit.accepts(unit) {
                return Err(parse_error(
                    entry.line,
                    key,
                    format!("wrong unit `{unit}`, expected {}", entry.unit.name()),
                ));
            }
        }
        Ok(number)
    }

    fn number(&self, key: &str, entry: &Entry, item: &str) -> Result<f64> {
        let text = self.split_unit(key, entry, item)?;
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(parse_error(entry.line, key, format!("`{text}` is not a finite number"))),
        }
    }

    fn float(&self, key: &str) -> Result<Option<f64>> {
        self.entries
            .get(key)
            .map(|e| self.number(key, e, &e.value))
            .transpose()
    }

    fn integer(&self, key: &str) -> Result<Option<usize>> {
        self.entries
            .get(key)
            .map(|e| {
                let text = self.split_unit(key, e, &e.value)?;
                text.parse::<usize>()
                    .map_err(|_| parse_error(e.line, key, format!("`{text}` is not a non-negative integer")))
            })
            .transpose()
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.entries
            .get(key)
            .map(|e| {
                e.value
                    .split(',')
                    .map(|item| self.number(key, e, item.trim()))
                    .collect::<Result<Vec<f64>>>()
            })
            .transpose()
    }

    fn text(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    fn check(&self, key: &str, ok: bool, message: &str) -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(parse_error(self.line(key), key, message))
        }
    }
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

/// Parses and validates a configuration, applying defaults.
pub fn load_config(text: &str) -> Result<ExperimentConfig> {
    let t = Table::parse(text)?;

    let mut missing: Vec<String> = [
        "medium.lambda0",
        "medium.n2",
        "medium.length",
        "probe.waist",
        "grid.n_points",
        "grid.width",
    ]
    .iter()
    .filter(|k| !t.has(k))
    .map(|k| k.to_string())
    .collect();
    if !t.has("pump.intensity") && !t.has("pump.delta_n_target") {
        missing.insert(3, "pump.intensity | pump.delta_n_target".into());
    }
    if !missing.is_empty() {
        return Err(Error::MissingKeys(missing));
    }

    let lambda0 = t.float("medium.lambda0")?.unwrap_or_default();
    t.check("medium.lambda0", lambda0 > 0.0, "must be positive")?;
    let n2 = t.float("medium.n2")?.unwrap_or_default();
    t.check("medium.n2", n2 != 0.0, "must be non-zero")?;
    let alpha = t.float("medium.alpha")?.unwrap_or(0.0);
    t.check("medium.alpha", alpha >= 0.0, "must be >= 0")?;
    let length = t.float("medium.length")?.unwrap_or_default();
    t.check("medium.length", length > 0.0, "must be positive")?;
    let medium = MediumSpec::new(lambda0, n2, alpha, length)?;

    let intensity = match (t.float("pump.intensity")?, t.float("pump.delta_n_target")?) {
        (Some(_), Some(_)) => {
            return Err(parse_error(
                t.line("pump.delta_n_target"),
                "pump.delta_n_target",
                "give either intensity or delta_n_target, not both",
            ))
        }
        (Some(i), None) => {
            t.check("pump.intensity", i > 0.0, "must be positive")?;
            i
        }
        (None, Some(dn)) => {
            t.check("pump.delta_n_target", dn != 0.0, "must be non-zero")?;
            (dn / n2).abs()
        }
        (None, None) => return Err(Error::MissingKeys(vec!["pump.intensity | pump.delta_n_target".into()])),
    };
    let pump = PumpSpec::new(intensity)?;

    let amplitude = t.float("probe.amplitude")?.unwrap_or(0.1);
    t.check("probe.amplitude", amplitude > 0.0 && amplitude <= 0.2, "must lie in (0, 0.2]")?;
    let waist = t.float("probe.waist")?.unwrap_or_default();
    t.check("probe.waist", waist > 0.0, "must be positive")?;
    let probe = ProbeSpec::new(amplitude, waist)
        .with_k_perp(t.float("probe.k_perp")?.unwrap_or(0.0))
        .with_phase(t.float("probe.phase")?.unwrap_or(0.0));

    let n_points = t.integer("grid.n_points")?.unwrap_or_default();
    t.check("grid.n_points", n_points >= 2, "must be >= 2")?;
    let width = t.float("grid.width")?.unwrap_or_default();
    t.check("grid.width", width > 0.0, "must be positive")?;
    let dx = width / n_points as f64;
    t.check("probe.waist", waist >= 8.0 * dx, "spans fewer than 8 grid points")?;

    let n_steps = t.integer("propagation.n_steps")?.unwrap_or(1000);
    t.check("propagation.n_steps", n_steps >= 1, "must be >= 1")?;
    let stride = t.integer("propagation.snapshot_stride")?.unwrap_or(0);
    let sponge_width = t.float("propagation.sponge_width")?.unwrap_or(0.0);
    t.check("propagation.sponge_width", sponge_width >= 0.0, "must be >= 0")?;
    t.check(
        "propagation.sponge_width",
        sponge_width < 0.5 * width,
        "must be less than half the window",
    )?;
    let sponge_strength = t.float("propagation.sponge_strength")?.unwrap_or(0.0);
    t.check("propagation.sponge_strength", sponge_strength >= 0.0, "must be >= 0")?;
    let mut plan = PropagationPlan::new(length, n_steps)?.with_snapshots(stride);
    if sponge_width > 0.0 && sponge_strength > 0.0 {
        plan = plan.with_sponge(Sponge {
            width: sponge_width,
            strength: sponge_strength,
        });
    }

    let nyquist = std::f64::consts::PI / dx;
    let scan = match (t.list("scan.k_values")?, t.float("scan.k_max")?, t.integer("scan.n_k")?) {
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
            return Err(parse_error(
                t.line("scan.k_values"),
                "scan.k_values",
                "give either k_values or k_max with n_k, not both",
            ))
        }
        (Some(ks), None, None) => {
            t.check(
                "scan.k_values",
                ks.iter().all(|&k| k >= 0.0) && strictly_increasing(&ks),
                "must be non-negative and strictly increasing",
            )?;
            t.check("scan.k_values", ks[0] == 0.0, "must start at 0")?;
            KScan::List(ks)
        }
        (None, Some(k_max), n) => {
            t.check("scan.k_max", k_max > 0.0, "must be positive")?;
            let n = n.unwrap_or(11);
            t.check("scan.n_k", n >= 2, "must be >= 2")?;
            KScan::Uniform { k_max, n }
        }
        (None, None, Some(_)) => {
            return Err(parse_error(t.line("scan.n_k"), "scan.n_k", "n_k requires k_max"))
        }
        (None, None, None) => KScan::List(Vec::new()),
    };
    let k_extent = scan.values().iter().chain([probe.k_perp].iter()).fold(0.0f64, |m, k| m.max(k.abs()));
    if k_extent >= 0.5 * nyquist {
        let key = if t.has("scan.k_values") {
            "scan.k_values"
        } else if t.has("scan.k_max") {
            "scan.k_max"
        } else {
            "probe.k_perp"
        };
        return Err(parse_error(t.line(key), key, "exceeds half the grid Nyquist wavenumber"));
    }

    let n_phase = t.integer("scan.n_phase")?.unwrap_or(40);
    t.check("scan.n_phase", n_phase >= 1, "must be >= 1")?;
    let filter = match t.text("scan.filter") {
        None | Some("auto") => FilterPolicy::Auto,
        Some("none") => FilterPolicy::None,
        Some(_) => {
            let c = t.float("scan.filter")?.unwrap_or_default();
            t.check("scan.filter", c > 0.0, "must be auto, none or a positive cutoff")?;
            FilterPolicy::Fixed(c)
        }
    };
    let intensities = t.list("scan.intensities")?.unwrap_or_default();
    t.check(
        "scan.intensities",
        intensities.iter().all(|&i| i > 0.0) && strictly_increasing(&intensities),
        "must be positive and strictly increasing",
    )?;

    Ok(ExperimentConfig {
        medium,
        n_points,
        width,
        pump,
        probe,
        plan,
        scan,
        intensities,
        n_phase,
        filter,
        output_dir: t.text("output.dir").map(PathBuf::from),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG2: &str = "
        [medium]
        lambda0 = 780e-9 m
        n2 = -3.1e-11 m2/W
        alpha = 0 1/m
        length = 7.5e-2 m
        [pump]
        delta_n_target = 1.3e-5
        [probe]
        waist = 180e-6 m
        [grid]
        n_points = 4096
        width = 8.192e-3 m
    ";

    #[test]
    fn fig2_parameters() {
        let c = load_config(FIG2).unwrap();
        assert!((c.pump.intensity - 1.3e-5 / 3.1e-11).abs() < 1e-6);
        assert!((c.bogoliubov().unwrap().delta_n + 1.3e-5).abs() < 1e-18);
        assert_eq!(c.probe.amplitude, 0.1);
        assert_eq!(c.probe.waist, 180e-6);
        assert_eq!(c.plan.n_steps, 1000);
        assert_eq!(c.plan.z_span, 0.075);
        assert_eq!(c.n_phase, 40);
        assert_eq!(c.filter, FilterPolicy::Auto);
        assert!(c.k_values().is_empty());
    }

    #[test]
    fn empty_text_lists_every_missing_key() {
        match load_config("") {
            Err(Error::MissingKeys(keys)) => assert_eq!(
                keys,
                vec![
                    "medium.lambda0",
                    "medium.n2",
                    "medium.length",
                    "pump.intensity | pump.delta_n_target",
                    "probe.waist",
                    "grid.n_points",
                    "grid.width",
                ]
            ),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn negative_waist_names_key_and_line() {
        let text = FIG2.replace("waist = 180e-6 m", "waist = -180e-6 m");
        match load_config(&text) {
            Err(Error::Parse { line, key, .. }) => {
                assert_eq!(key, "probe.waist");
                assert_eq!(line, 10);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn wrong_unit_is_rejected() {
        let text = FIG2.replace("length = 7.5e-2 m", "length = 7.5 cm");
        assert!(matches!(load_config(&text), Err(Error::Parse { key, .. }) if key == "medium.length"));
    }

    #[test]
    fn unknown_key_is_rejected() {
        let text = format!("{FIG2}\n[scan]\nk_step = 3\n");
        assert!(matches!(load_config(&text), Err(Error::Parse { key, .. }) if key == "scan.k_step"));
    }

    #[test]
    fn scan_forms() {
        let list = load_config(&format!("{FIG2}\n[scan]\nk_values = 0, 1e4, 2e4 1/m\n")).unwrap();
        assert_eq!(list.k_values(), vec![0.0, 1e4, 2e4]);
        let uniform = load_config(&format!("{FIG2}\n[scan]\nk_max = 1e5\nn_k = 5\n")).unwrap();
        assert_eq!(uniform.k_values(), vec![0.0, 2.5e4, 5e4, 7.5e4, 1e5]);
        assert!(load_config(&format!("{FIG2}\n[scan]\nk_values = 1e4, 2e4\n")).is_err());
        assert!(load_config(&format!("{FIG2}\n[scan]\nk_values = 0, 1e6\n")).is_err());
    }

    #[test]
    fn filter_and_intensities() {
        let c = load_config(&format!(
            "{FIG2}\n[scan]\nfilter = 2e4 1/m\nintensities = 1e5, 2e5, 4e5 W/m2\nn_phase = 16\n"
        ))
        .unwrap();
        assert_eq!(c.filter, FilterPolicy::Fixed(2e4));
        assert_eq!(c.intensities, vec![1e5, 2e5, 4e5]);
        assert_eq!(c.n_phase, 16);
        assert!(load_config(&format!("{FIG2}\n[scan]\nfilter = sometimes\n")).is_err());
    }

    #[test]
    fn intensity_and_target_are_exclusive() {
        let text = FIG2.replace("delta_n_target = 1.3e-5", "delta_n_target = 1.3e-5\nintensity = 1e5");
        assert!(matches!(load_config(&text), Err(Error::Parse { .. })));
    }
}
