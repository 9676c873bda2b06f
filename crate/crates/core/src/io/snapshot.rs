//! Binary field snapshots.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! "PFL1"            magic
//! u32               format version (1)
//! u32               header length in bytes
//! header            UTF-8 `key=value` lines: n_points, width_m, z_m,
//!                   lambda0_m, intensity_units
//! n_points × (f64 re, f64 im)
//! ```

use std::fs;
use std::path::Path;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::grid::make_grid;

pub const MAGIC: &[u8; 4] = b"PFL1";
pub const VERSION: u32 = 1;

/// A field together with the vacuum wavelength it was computed for.
#[derive(Debug, Clone)]
pub struct FieldSnapshot {
    pub field: ComplexField,
    pub lambda0: f64,
}

pub fn write_snapshot(field: &ComplexField, lambda0: f64) -> Vec<u8> {
    let grid = field.grid();
    let header = format!(
        "n_points={}\nwidth_m={:e}\nz_m={:e}\nlambda0_m={:e}\nintensity_units=W/m2\n",
        grid.n_points(),
        grid.width(),
        field.z(),
        lambda0
    );
    let mut out = Vec::with_capacity(12 + header.len() + 16 * grid.n_points());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(header.len() as u32).to_le_bytes());
    out.extend_from_slice(header.as_bytes());
    for v in field.samples() {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

fn format_error(message: impl Into<String>) -> Error {
    Error::Format(message.into())
}

fn read_u32(bytes: &[u8], at: usize) -> Result<u32> {
    bytes
        .get(at..at + 4)
        .and_then(|b| b.try_into().ok())
        .map(u32::from_le_bytes)
        .ok_or_else(|| format_error("truncated preamble"))
}

pub fn read_snapshot(bytes: &[u8]) -> Result<FieldSnapshot> {
    if bytes.get(..4) != Some(MAGIC.as_slice()) {
        return Err(format_error("bad magic, not a field snapshot"));
    }
    let version = read_u32(bytes, 4)?;
    if version != VERSION {
        return Err(format_error(format!("unsupported version {version}, expected {VERSION}")));
    }
    let header_len = read_u32(bytes, 8)? as usize;
    let header = bytes
        .get(12..12 + header_len)
        .ok_or_else(|| format_error("truncated header"))?;
    let header = std::str::from_utf8(header).map_err(|_| format_error("header is not UTF-8"))?;

    let mut n_points = None;
    let mut width = None;
    let mut z = None;
    let mut lambda0 = None;
    let mut units = None;
    for line in header.lines().filter(|l| !l.is_empty()) {
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format_error(format!("malformed header line `{line}`")))?;
        let float = || {
            value
                .parse::<f64>()
                .map_err(|_| format_error(format!("bad value for {key}: `{value}`")))
        };
        match key {
            "n_points" => {
                n_points = Some(
                    value
                        .parse::<usize>()
                        .map_err(|_| format_error(format!("bad n_points `{value}`")))?,
                )
            }
            "width_m" => width = Some(float()?),
            "z_m" => z = Some(float()?),
            "lambda0_m" => lambda0 = Some(float()?),
            "intensity_units" => units = Some(value.to_string()),
            _ => return Err(format_error(format!("unknown header key `{key}`"))),
        }
    }
    let missing = |name: &str| format_error(format!("header lacks {name}"));
    let n_points = n_points.ok_or_else(|| missing("n_points"))?;
    let width = width.ok_or_else(|| missing("width_m"))?;
    let z = z.ok_or_else(|| missing("z_m"))?;
    let lambda0 = lambda0.ok_or_else(|| missing("lambda0_m"))?;
    match units.as_deref() {
        Some("W/m2") => {}
        Some(other) => return Err(format_error(format!("unsupported intensity units `{other}`"))),
        None => return Err(missing("intensity_units")),
    }

    let payload = &bytes[12 + header_len..];
    let expected = n_points
        .checked_mul(16)
        .ok_or_else(|| format_error("n_points overflows"))?;
    if payload.len() != expected {
        return Err(format_error(format!(
            "payload is {} bytes, expected {expected} for {n_points} points",
            payload.len()
        )));
    }
    let samples: Vec<Complex64> = payload
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8-byte slice"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8-byte slice"));
            Complex64::new(re, im)
        })
        .collect();
    let grid = make_grid(n_points, width).map_err(|e| format_error(e.to_string()))?;
    let field = ComplexField::new(grid, samples, z).map_err(|e| format_error(e.to_string()))?;
    Ok(FieldSnapshot { field, lambda0 })
}

pub fn write_snapshot_file(path: &Path, field: &ComplexField, lambda0: f64) -> Result<()> {
    fs::write(path, write_snapshot(field, lambda0))?;
    Ok(())
}

pub fn read_snapshot_file(path: &Path) -> Result<FieldSnapshot> {
    read_snapshot(&fs::read(path)?)
}
