//! CSV import/export for mode tables and mode-shape grids.
//!
//! Mode table: header `label,f_m_hz,m_eff_kg,q,fem_f_hz,fem_m_kg`; the two
//! FEM columns may be empty.
//!
//! Mode shape: a `# areal_density_kg_m2=<value>` line, the header
//! `x_m,y_m,u`, then one row per lattice point (any order).

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use super::{MechanicalMode, ModeShape};
use crate::{Error, Result};

const MODE_HEADER: &str = "label,f_m_hz,m_eff_kg,q,fem_f_hz,fem_m_kg";

fn parse_err(origin: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: origin.to_string(),
        message: format!("line {line}: {}", message.into()),
    }
}

fn number(origin: &str, line: usize, field: &str, text: &str) -> Result<f64> {
    text.trim()
        .parse::<f64>()
        .map_err(|e| parse_err(origin, line, format!("bad {field} `{}`: {e}", text.trim())))
}

pub fn parse_mode_table(text: &str, origin: &str) -> Result<Vec<MechanicalMode>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (n, header) = lines
        .next()
        .ok_or_else(|| parse_err(origin, 1, "empty mode table"))?;
    if header.replace(' ', "") != MODE_HEADER {
        return Err(parse_err(origin, n, format!("expected header `{MODE_HEADER}`")));
    }
    let mut modes = Vec::new();
    for (n, line) in lines {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 6 {
            return Err(parse_err(origin, n, format!("expected 6 columns, got {}", cols.len())));
        }
        let mode = MechanicalMode::new(
            cols[0].trim(),
            number(origin, n, "f_m_hz", cols[1])?,
            number(origin, n, "m_eff_kg", cols[2])?,
            number(origin, n, "q", cols[3])?,
        )
        .map_err(|e| parse_err(origin, n, e.to_string()))?;
        let mode = match (cols[4].trim(), cols[5].trim()) {
            ("", "") => mode,
            (f, m) => mode.with_fem_prediction(
                number(origin, n, "fem_f_hz", f)?,
                number(origin, n, "fem_m_kg", m)?,
            ),
        };
        modes.push(mode);
    }
    check_unique_labels(&modes)?;
    Ok(modes)
}

pub fn read_mode_table(path: impl AsRef<Path>) -> Result<Vec<MechanicalMode>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_mode_table(&text, &path.display().to_string())
}

pub fn mode_table_to_csv(modes: &[MechanicalMode]) -> String {
    let mut out = format!("{MODE_HEADER}\n");
    for m in modes {
        let (ff, fm) = match m.fem_prediction() {
            Some((f, mass)) => (format!("{f:e}"), format!("{mass:e}")),
            None => (String::new(), String::new()),
        };
        out.push_str(&format!(
            "{},{:e},{:e},{:e},{ff},{fm}\n",
            m.label(),
            m.resonance_frequency(),
            m.effective_mass(),
            m.quality_factor()
        ));
    }
    out
}

/// Duplicate labels make per-mode outputs ambiguous.
pub fn check_unique_labels(modes: &[MechanicalMode]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for m in modes {
        if !seen.insert(m.label()) {
            return Err(Error::Config(format!("duplicate mode label `{}`", m.label())));
        }
    }
    Ok(())
}

pub fn parse_mode_shape(text: &str, origin: &str) -> Result<ModeShape> {
    let mut areal = None;
    let mut header_seen = false;
    let mut points: BTreeMap<(u64, u64), f64> = BTreeMap::new();
    let mut xs = BTreeSet::new();
    let mut ys = BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            for token in meta.split_whitespace() {
                if let Some(v) = token.strip_prefix("areal_density_kg_m2=") {
                    areal = Some(number(origin, n, "areal_density_kg_m2", v)?);
                }
            }
            continue;
        }
        if !header_seen {
            if line.replace(' ', "") != "x_m,y_m,u" {
                return Err(parse_err(origin, n, "expected header `x_m,y_m,u`"));
            }
            header_seen = true;
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(parse_err(origin, n, format!("expected 3 columns, got {}", cols.len())));
        }
        let x = number(origin, n, "x_m", cols[0])?;
        let y = number(origin, n, "y_m", cols[1])?;
        let u = number(origin, n, "u", cols[2])?;
        // key on the bit pattern: lattice coordinates come from the same writer
        xs.insert(x.to_bits());
        ys.insert(y.to_bits());
        if points.insert((x.to_bits(), y.to_bits()), u).is_some() {
            return Err(parse_err(origin, n, format!("duplicate lattice point ({x}, {y})")));
        }
    }
    let areal = areal.ok_or_else(|| parse_err(origin, 1, "missing `# areal_density_kg_m2=` line"))?;
    let mut xs: Vec<f64> = xs.into_iter().map(f64::from_bits).collect();
    let mut ys: Vec<f64> = ys.into_iter().map(f64::from_bits).collect();
    xs.sort_by(|a, b| a.total_cmp(b));
    ys.sort_by(|a, b| a.total_cmp(b));
    let mut amplitudes = Vec::with_capacity(xs.len() * ys.len());
    for y in &ys {
        for x in &xs {
            let u = points.get(&(x.to_bits(), y.to_bits())).ok_or_else(|| Error::Parse {
                path: origin.to_string(),
                message: format!("lattice point ({x}, {y}) missing"),
            })?;
            amplitudes.push(*u);
        }
    }
    ModeShape::new(xs, ys, amplitudes, areal).map_err(|e| Error::Parse {
        path: origin.to_string(),
        message: e.to_string(),
    })
}

pub fn read_mode_shape(path: impl AsRef<Path>) -> Result<ModeShape> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_mode_shape(&text, &path.display().to_string())
}

pub fn mode_shape_to_csv(shape: &ModeShape) -> String {
    let mut out = format!("# areal_density_kg_m2={:e}\nx_m,y_m,u\n", shape.areal_density());
    for (iy, y) in shape.ys().iter().enumerate() {
        for (ix, x) in shape.xs().iter().enumerate() {
            out.push_str(&format!("{x:e},{y:e},{:e}\n", shape.amplitude(ix, iy)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanics::clamped_beam_mode_shape;

    #[test]
    fn mode_table_round_trip() {
        let text = "label,f_m_hz,m_eff_kg,q,fem_f_hz,fem_m_kg\n\
                    814kHz,8.14e5,1.9e-7,1e4,8.9e5,1.3e-7\n\
                    other,1.2e6,5e-8,8000,,\n";
        let modes = parse_mode_table(text, "mem").unwrap();
        assert_eq!(modes.len(), 2);
        assert_eq!(modes[0].fem_prediction(), Some((8.9e5, 1.3e-7)));
        assert_eq!(modes[1].fem_prediction(), None);
        let again = parse_mode_table(&mode_table_to_csv(&modes), "mem").unwrap();
        assert_eq!(again, modes);
    }

    #[test]
    fn mode_table_rejects_duplicates_and_bad_values() {
        let dup = "label,f_m_hz,m_eff_kg,q,fem_f_hz,fem_m_kg\na,1e6,1e-9,1e3,,\na,2e6,1e-9,1e3,,\n";
        assert!(matches!(parse_mode_table(dup, "mem"), Err(Error::Config(_))));
        let bad = "label,f_m_hz,m_eff_kg,q,fem_f_hz,fem_m_kg\na,-1,1e-9,1e3,,\n";
        assert!(parse_mode_table(bad, "mem").is_err());
    }

    #[test]
    fn mode_shape_round_trip() {
        let s = clamped_beam_mode_shape(2, 1e-3, 1e-3, 0.14, 21, 5).unwrap();
        let back = parse_mode_shape(&mode_shape_to_csv(&s), "mem").unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn mode_shape_needs_density_and_full_lattice() {
        assert!(parse_mode_shape("x_m,y_m,u\n0,0,1\n1,0,1\n0,1,1\n1,1,1\n", "mem").is_err());
        let holey = "# areal_density_kg_m2=0.1\nx_m,y_m,u\n0,0,1\n1,0,1\n0,1,1\n";
        assert!(parse_mode_shape(holey, "mem").is_err());
    }
}
