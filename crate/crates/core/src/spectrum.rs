//! One-sided spectral densities on explicit frequency grids.
//!
//! A [`NoiseSpectrum`] is a PSD in `unit²/Hz`; an [`AmplitudeSpectrum`] is the
//! matching ASD in `unit/√Hz`. Both are immutable: every operation returns a
//! new value. Binary operations check the unit tag and the grid.

use std::fmt;
use std::fs;
use std::path::Path;

use crate::{Error, Result};

/// Physical quantity whose fluctuations a spectrum describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpectrumUnit {
    /// Displacement, PSD in m²/Hz.
    Displacement,
    /// Force, PSD in N²/Hz.
    Force,
    /// Optical frequency, PSD in Hz²/Hz.
    Frequency,
    /// Dimensionless quantity, PSD in 1/Hz.
    Dimensionless,
}

impl SpectrumUnit {
    pub fn psd_tag(self) -> &'static str {
        match self {
            SpectrumUnit::Displacement => "m2/Hz",
            SpectrumUnit::Force => "N2/Hz",
            SpectrumUnit::Frequency => "Hz2/Hz",
            SpectrumUnit::Dimensionless => "1/Hz",
        }
    }

    pub fn asd_tag(self) -> &'static str {
        match self {
            SpectrumUnit::Displacement => "m/rtHz",
            SpectrumUnit::Force => "N/rtHz",
            SpectrumUnit::Frequency => "Hz/rtHz",
            SpectrumUnit::Dimensionless => "1/rtHz",
        }
    }

    pub fn from_psd_tag(tag: &str) -> Option<Self> {
        [
            SpectrumUnit::Displacement,
            SpectrumUnit::Force,
            SpectrumUnit::Frequency,
            SpectrumUnit::Dimensionless,
        ]
        .into_iter()
        .find(|u| u.psd_tag() == tag)
    }
}

impl fmt::Display for SpectrumUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.psd_tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridSpacing {
    Linear,
    Logarithmic,
}

/// A regular frequency grid description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    f_min: f64,
    f_max: f64,
    n_points: usize,
    spacing: GridSpacing,
}

impl FrequencyGrid {
    pub fn new(f_min: f64, f_max: f64, n_points: usize, spacing: GridSpacing) -> Result<Self> {
        if n_points < 2 {
            return Err(Error::Invariant(format!(
                "a frequency grid needs at least 2 points, got {n_points}"
            )));
        }
        if !(f_min.is_finite() && f_max.is_finite()) || f_min < 0.0 || f_max <= f_min {
            return Err(Error::Invariant(format!(
                "frequency grid bounds must satisfy 0 <= f_min < f_max, got [{f_min}, {f_max}]"
            )));
        }
        if spacing == GridSpacing::Logarithmic && f_min <= 0.0 {
            return Err(Error::Invariant(
                "logarithmic grids need f_min > 0".to_string(),
            ));
        }
        Ok(Self {
            f_min,
            f_max,
            n_points,
            spacing,
        })
    }

    pub fn linear(f_min: f64, f_max: f64, n_points: usize) -> Result<Self> {
        Self::new(f_min, f_max, n_points, GridSpacing::Linear)
    }

    pub fn logarithmic(f_min: f64, f_max: f64, n_points: usize) -> Result<Self> {
        Self::new(f_min, f_max, n_points, GridSpacing::Logarithmic)
    }

    pub fn f_min(&self) -> f64 {
        self.f_min
    }

    pub fn f_max(&self) -> f64 {
        self.f_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> GridSpacing {
        self.spacing
    }

    pub fn points(&self) -> Vec<f64> {
        let last = (self.n_points - 1) as f64;
        let mut pts: Vec<f64> = match self.spacing {
            GridSpacing::Linear => (0..self.n_points)
                .map(|i| self.f_min + (self.f_max - self.f_min) * i as f64 / last)
                .collect(),
            GridSpacing::Logarithmic => {
                let (a, b) = (self.f_min.ln(), self.f_max.ln());
                (0..self.n_points)
                    .map(|i| (a + (b - a) * i as f64 / last).exp())
                    .collect()
            }
        };
        // pin the end points against rounding in exp/ln
        pts[0] = self.f_min;
        pts[self.n_points - 1] = self.f_max;
        pts
    }

    /// Grid points merged with refinements around narrow features.
    ///
    /// Each `(center, width)` adds points spaced `width / 20` over
    /// `center ± 2·width`, then offsets growing geometrically by 3% per step
    /// out to the grid span, so both the peak and its tails are resolved.
    /// Use the full width at half maximum of a resonance as `width`.
    pub fn points_with_resonances(&self, resonances: &[(f64, f64)]) -> Vec<f64> {
        let mut pts = self.points();
        let inside = |f: f64| f >= self.f_min && f <= self.f_max;
        for &(center, width) in resonances {
            if !(width > 0.0) {
                continue;
            }
            let step = width / 20.0;
            pts.extend((-40..=40).map(|i| center + step * i as f64).filter(|f| inside(*f)));
            let reach = (center - self.f_min).max(self.f_max - center);
            let mut offset = 2.0 * width;
            while offset < reach {
                offset *= 1.03;
                pts.extend([center - offset, center + offset].into_iter().filter(|f| inside(*f)));
            }
        }
        merge_sorted(pts)
    }
}

/// Sort and drop points that coincide to within 1e-12 relative.
pub(crate) fn merge_sorted(mut pts: Vec<f64>) -> Vec<f64> {
    pts.sort_by(|a, b| a.total_cmp(b));
    let mut out: Vec<f64> = Vec::with_capacity(pts.len());
    for p in pts {
        match out.last() {
            Some(&q) if (p - q).abs() <= 1e-12 * p.abs().max(q.abs()) => {}
            _ => out.push(p),
        }
    }
    out
}

fn check_grid(frequencies: &[f64]) -> Result<()> {
    if frequencies.is_empty() {
        return Err(Error::Invariant("spectrum grid is empty".to_string()));
    }
    if frequencies.iter().any(|f| !f.is_finite() || *f < 0.0) {
        return Err(Error::Invariant(
            "spectrum frequencies must be finite and non-negative".to_string(),
        ));
    }
    if let Some(w) = frequencies.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::Invariant(format!(
            "spectrum grid not strictly increasing at {} -> {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// Index `i` with `xs[i] <= x <= xs[i + 1]`; `xs` strictly increasing, len >= 2.
fn bracket(xs: &[f64], x: f64) -> usize {
    let i = xs.partition_point(|&v| v <= x);
    i.clamp(1, xs.len() - 1) - 1
}

/// A one-sided power spectral density sampled on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpectrum {
    frequencies: Vec<f64>,
    values: Vec<f64>,
    unit: SpectrumUnit,
    rbw_hz: Option<f64>,
}

impl NoiseSpectrum {
    pub fn new(frequencies: Vec<f64>, values: Vec<f64>, unit: SpectrumUnit) -> Result<Self> {
        check_grid(&frequencies)?;
        if frequencies.len() != values.len() {
            return Err(Error::Invariant(format!(
                "{} frequencies but {} values",
                frequencies.len(),
                values.len()
            )));
        }
        if let Some((f, v)) = frequencies
            .iter()
            .zip(&values)
            .find(|(_, v)| !(**v >= 0.0) || !v.is_finite())
        {
            return Err(Error::Invariant(format!(
                "PSD value at {f} Hz must be finite and >= 0, got {v}"
            )));
        }
        Ok(Self {
            frequencies,
            values,
            unit,
            rbw_hz: None,
        })
    }

    /// Evaluate a PSD model on the given grid.
    pub fn from_fn(frequencies: Vec<f64>, unit: SpectrumUnit, psd: impl Fn(f64) -> f64) -> Result<Self> {
        let values = frequencies.iter().map(|&f| psd(f)).collect();
        Self::new(frequencies, values, unit)
    }

    /// A constant PSD on the given grid.
    pub fn flat(frequencies: Vec<f64>, unit: SpectrumUnit, level: f64) -> Result<Self> {
        Self::from_fn(frequencies, unit, |_| level)
    }

    /// Attach the (Hann-window) resolution bandwidth this estimate was made with.
    pub fn with_rbw(mut self, rbw_hz: f64) -> Self {
        self.rbw_hz = Some(rbw_hz);
        self
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn unit(&self) -> SpectrumUnit {
        self.unit
    }

    pub fn rbw_hz(&self) -> Option<f64> {
        self.rbw_hz
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn f_min(&self) -> f64 {
        self.frequencies[0]
    }

    pub fn f_max(&self) -> f64 {
        *self.frequencies.last().unwrap()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.frequencies.iter().copied().zip(self.values.iter().copied())
    }

    fn check_unit(&self, other: SpectrumUnit) -> Result<()> {
        if self.unit != other {
            return Err(Error::UnitMismatch {
                expected: self.unit.to_string(),
                found: other.to_string(),
            });
        }
        Ok(())
    }

    pub fn require_unit(&self, unit: SpectrumUnit) -> Result<()> {
        if self.unit != unit {
            return Err(Error::UnitMismatch {
                expected: unit.to_string(),
                found: self.unit.to_string(),
            });
        }
        Ok(())
    }

    fn check_span(&self, f_lo: f64, f_hi: f64) -> Result<()> {
        let tol = 1e-12 * self.f_max().max(1.0);
        if f_lo < self.f_min() - tol || f_hi > self.f_max() + tol {
            return Err(Error::Domain(format!(
                "range [{f_lo}, {f_hi}] Hz outside spectrum span [{}, {}] Hz",
                self.f_min(),
                self.f_max()
            )));
        }
        Ok(())
    }

    /// Linear interpolation; no extrapolation outside the grid.
    pub fn value_at(&self, f: f64) -> Result<f64> {
        self.check_span(f, f)?;
        if self.len() == 1 {
            return Ok(self.values[0]);
        }
        let i = bracket(&self.frequencies, f);
        let (f0, f1) = (self.frequencies[i], self.frequencies[i + 1]);
        let t = ((f - f0) / (f1 - f0)).clamp(0.0, 1.0);
        Ok(self.values[i] + t * (self.values[i + 1] - self.values[i]))
    }

    /// Pointwise sum of two spectra on the same grid with the same unit.
    pub fn add(&self, other: &NoiseSpectrum) -> Result<NoiseSpectrum> {
        self.check_unit(other.unit)?;
        if self.frequencies != other.frequencies {
            return Err(Error::Domain(
                "spectra must share a frequency grid to be added".to_string(),
            ));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        Ok(NoiseSpectrum {
            frequencies: self.frequencies.clone(),
            values,
            unit: self.unit,
            rbw_hz: None,
        })
    }

    /// Multiply every value by a non-negative factor, optionally retagging the unit.
    pub fn scaled(&self, factor: f64, unit: SpectrumUnit) -> Result<NoiseSpectrum> {
        if !(factor >= 0.0) || !factor.is_finite() {
            return Err(Error::Invariant(format!(
                "PSD scale factor must be finite and >= 0, got {factor}"
            )));
        }
        Ok(NoiseSpectrum {
            frequencies: self.frequencies.clone(),
            values: self.values.iter().map(|v| v * factor).collect(),
            unit,
            rbw_hz: self.rbw_hz,
        })
    }

    /// Restrict to the grid points inside `[f_lo, f_hi]`.
    pub fn window(&self, f_lo: f64, f_hi: f64) -> Result<NoiseSpectrum> {
        let (freqs, vals): (Vec<f64>, Vec<f64>) = self
            .iter()
            .filter(|(f, _)| *f >= f_lo && *f <= f_hi)
            .unzip();
        if freqs.is_empty() {
            return Err(Error::Domain(format!(
                "no spectrum points inside [{f_lo}, {f_hi}] Hz"
            )));
        }
        Ok(NoiseSpectrum {
            frequencies: freqs,
            values: vals,
            unit: self.unit,
            rbw_hz: self.rbw_hz,
        })
    }

    /// Trapezoidal integral over `[f_lo, f_hi]`, in unit².
    ///
    /// End points falling between grid nodes are linearly interpolated, so the
    /// result is exact for PSDs that are piecewise linear on the grid.
    pub fn integrate(&self, f_lo: f64, f_hi: f64) -> Result<f64> {
        if f_hi < f_lo {
            return Err(Error::Domain(format!(
                "integration range reversed: [{f_lo}, {f_hi}]"
            )));
        }
        self.check_span(f_lo, f_hi)?;
        if f_hi == f_lo || self.len() < 2 {
            return Ok(0.0);
        }
        let f_lo = f_lo.max(self.f_min());
        let f_hi = f_hi.min(self.f_max());
        let i_lo = bracket(&self.frequencies, f_lo);
        let i_hi = bracket(&self.frequencies, f_hi);
        let interp = |i: usize, f: f64| {
            let (f0, f1) = (self.frequencies[i], self.frequencies[i + 1]);
            let t = (f - f0) / (f1 - f0);
            self.values[i] + t * (self.values[i + 1] - self.values[i])
        };
        let v_lo = interp(i_lo, f_lo);
        let v_hi = interp(i_hi, f_hi);
        if i_lo == i_hi {
            return Ok(0.5 * (v_lo + v_hi) * (f_hi - f_lo));
        }
        let mut sum = 0.5 * (v_lo + self.values[i_lo + 1]) * (self.frequencies[i_lo + 1] - f_lo);
        for i in i_lo + 1..i_hi {
            sum += 0.5
                * (self.values[i] + self.values[i + 1])
                * (self.frequencies[i + 1] - self.frequencies[i]);
        }
        sum += 0.5 * (self.values[i_hi] + v_hi) * (f_hi - self.frequencies[i_hi]);
        Ok(sum)
    }

    /// Integral over the whole grid.
    pub fn total_variance(&self) -> f64 {
        self.integrate(self.f_min(), self.f_max()).unwrap_or(0.0)
    }

    /// Resample onto a new grid by linear interpolation.
    pub fn resample_linear(&self, frequencies: &[f64]) -> Result<NoiseSpectrum> {
        let values = frequencies
            .iter()
            .map(|&f| self.value_at(f))
            .collect::<Result<Vec<_>>>()?;
        NoiseSpectrum::new(frequencies.to_vec(), values, self.unit)
    }

    /// Resample onto a new grid by linear interpolation in log-log space.
    ///
    /// Segments touching a zero value or a zero frequency fall back to
    /// linear interpolation.
    pub fn resample_loglog(&self, frequencies: &[f64]) -> Result<NoiseSpectrum> {
        if let (Some(&lo), Some(&hi)) = (frequencies.first(), frequencies.last()) {
            self.check_span(lo, hi)?;
        }
        let values = frequencies
            .iter()
            .map(|&f| {
                if self.len() == 1 {
                    return self.values[0];
                }
                let i = bracket(&self.frequencies, f);
                let (f0, f1) = (self.frequencies[i], self.frequencies[i + 1]);
                let (v0, v1) = (self.values[i], self.values[i + 1]);
                if v0 == v1 {
                    v0
                } else if f0 > 0.0 && v0 > 0.0 && v1 > 0.0 && f > 0.0 {
                    let t = ((f / f0).ln() / (f1 / f0).ln()).clamp(0.0, 1.0);
                    (v0.ln() + t * (v1 / v0).ln()).exp()
                } else {
                    let t = ((f - f0) / (f1 - f0)).clamp(0.0, 1.0);
                    v0 + t * (v1 - v0)
                }
            })
            .collect();
        NoiseSpectrum::new(frequencies.to_vec(), values, self.unit)
    }

    /// Element-wise square root: PSD (unit²/Hz) to ASD (unit/√Hz).
    pub fn to_asd(&self) -> AmplitudeSpectrum {
        AmplitudeSpectrum {
            frequencies: self.frequencies.clone(),
            values: self.values.iter().map(|v| v.sqrt()).collect(),
            unit: self.unit,
        }
    }

    /// Serialize as `# unit=<tag> sidedness=one` + `frequency_hz,value` CSV.
    pub fn to_csv_string(&self) -> String {
        let mut out = format!("# unit={} sidedness=one", self.unit.psd_tag());
        if let Some(rbw) = self.rbw_hz {
            out.push_str(&format!(" rbw_hz={rbw:e}"));
        }
        out.push_str("\nfrequency_hz,value\n");
        for (f, v) in self.iter() {
            out.push_str(&format!("{f:e},{v:e}\n"));
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<NoiseSpectrum> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_csv(&text, &path.display().to_string())
    }

    /// Parse the spectrum CSV format; `origin` labels error messages.
    pub fn parse_csv(text: &str, origin: &str) -> Result<NoiseSpectrum> {
        let err = |line: usize, msg: String| Error::Parse {
            path: origin.to_string(),
            message: format!("line {line}: {msg}"),
        };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let (n, header) = lines
            .next()
            .ok_or_else(|| err(1, "empty spectrum file".to_string()))?;
        let header = header
            .strip_prefix('#')
            .ok_or_else(|| err(n, "expected `# unit=<tag> sidedness=one` header".to_string()))?;
        let mut unit = None;
        let mut sided = None;
        let mut rbw = None;
        for token in header.split_whitespace() {
            let (k, v) = token
                .split_once('=')
                .ok_or_else(|| err(n, format!("malformed header token `{token}`")))?;
            match k {
                "unit" => {
                    unit = Some(
                        SpectrumUnit::from_psd_tag(v)
                            .ok_or_else(|| err(n, format!("unknown unit tag `{v}`")))?,
                    )
                }
                "sidedness" => sided = Some(v.to_string()),
                "rbw_hz" => {
                    rbw = Some(
                        v.parse::<f64>()
                            .map_err(|e| err(n, format!("bad rbw_hz `{v}`: {e}")))?,
                    )
                }
                other => return Err(err(n, format!("unknown header key `{other}`"))),
            }
        }
        let unit = unit.ok_or_else(|| err(n, "header lacks unit=".to_string()))?;
        match sided.as_deref() {
            Some("one") => {}
            Some(s) => return Err(err(n, format!("only one-sided spectra are supported, got `{s}`"))),
            None => return Err(err(n, "header lacks sidedness=".to_string())),
        }
        let (n, cols) = lines
            .next()
            .ok_or_else(|| err(2, "missing column header".to_string()))?;
        if cols.replace(' ', "") != "frequency_hz,value" {
            return Err(err(n, format!("expected `frequency_hz,value`, got `{cols}`")));
        }
        let mut freqs = Vec::new();
        let mut vals = Vec::new();
        for (n, line) in lines {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (f, v) = line
                .split_once(',')
                .ok_or_else(|| err(n, format!("expected two columns, got `{line}`")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| err(n, format!("bad number `{}`: {e}", s.trim())))
            };
            freqs.push(parse(f)?);
            vals.push(parse(v)?);
        }
        let spec = NoiseSpectrum::new(freqs, vals, unit).map_err(|e| Error::Parse {
            path: origin.to_string(),
            message: e.to_string(),
        })?;
        Ok(match rbw {
            Some(r) => spec.with_rbw(r),
            None => spec,
        })
    }
}

/// One-sided amplitude spectral density in unit/√Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeSpectrum {
    frequencies: Vec<f64>,
    values: Vec<f64>,
    unit: SpectrumUnit,
}

impl AmplitudeSpectrum {
    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn unit(&self) -> SpectrumUnit {
        self.unit
    }

    pub fn unit_tag(&self) -> &'static str {
        self.unit.asd_tag()
    }

    pub fn value_at(&self, f: f64) -> Result<f64> {
        self.to_psd()?.value_at(f).map(f64::sqrt)
    }

    /// Square back to a PSD.
    pub fn to_psd(&self) -> Result<NoiseSpectrum> {
        NoiseSpectrum::new(
            self.frequencies.clone(),
            self.values.iter().map(|v| v * v).collect(),
            self.unit,
        )
    }
}

/// PSD to ASD, rejecting negative values.
pub fn asd_from_psd(spectrum: &NoiseSpectrum) -> Result<AmplitudeSpectrum> {
    if let Some(v) = spectrum.values().iter().find(|v| !(**v >= 0.0)) {
        return Err(Error::Invariant(format!("negative PSD value {v}")));
    }
    Ok(spectrum.to_asd())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lin(n: usize, hi: f64) -> Vec<f64> {
        FrequencyGrid::linear(0.0, hi, n).unwrap().points()
    }

    #[test]
    fn asd_examples() {
        let s = NoiseSpectrum::new(vec![1e6], vec![1.6e-37], SpectrumUnit::Displacement).unwrap();
        let a = asd_from_psd(&s).unwrap();
        assert!((a.values()[0] / 4.0e-19 - 1.0).abs() < 1e-12);
        assert_eq!(a.unit_tag(), "m/rtHz");

        let z = NoiseSpectrum::new(vec![1.0], vec![0.0], SpectrumUnit::Displacement).unwrap();
        assert_eq!(asd_from_psd(&z).unwrap().values()[0], 0.0);

        let one = NoiseSpectrum::new(vec![1.0], vec![1.0], SpectrumUnit::Dimensionless).unwrap();
        assert_eq!(asd_from_psd(&one).unwrap().values()[0], 1.0);
    }

    #[test]
    fn negative_values_are_rejected() {
        let r = NoiseSpectrum::new(vec![1.0, 2.0], vec![1.0, -1e-40], SpectrumUnit::Force);
        assert!(matches!(r, Err(Error::Invariant(_))));
    }

    #[test]
    fn grid_must_increase() {
        assert!(NoiseSpectrum::new(vec![1.0, 1.0], vec![0.0, 0.0], SpectrumUnit::Force).is_err());
        assert!(NoiseSpectrum::new(vec![2.0, 1.0], vec![0.0, 0.0], SpectrumUnit::Force).is_err());
    }

    #[test]
    fn integrate_rectangle_and_degenerate() {
        let s = NoiseSpectrum::flat(lin(11, 10.0), SpectrumUnit::Dimensionless, 2.0).unwrap();
        assert!((s.integrate(0.0, 10.0).unwrap() - 20.0).abs() < 1e-12);
        assert_eq!(s.integrate(3.3, 3.3).unwrap(), 0.0);
        assert!(matches!(s.integrate(-1.0, 5.0), Err(Error::Domain(_))));
        assert!(matches!(s.integrate(1.0, 11.0), Err(Error::Domain(_))));
    }

    #[test]
    fn integrate_exact_for_piecewise_linear() {
        // triangle 0 -> 4 -> 0 over [0, 2]
        let s = NoiseSpectrum::new(vec![0.0, 1.0, 2.0], vec![0.0, 4.0, 0.0], SpectrumUnit::Force)
            .unwrap();
        assert!((s.integrate(0.0, 2.0).unwrap() - 4.0).abs() < 1e-15);
        // partial interval [0.5, 1.5]: 4 - 2 * (0.5 * 0.5 * 2) = 3
        assert!((s.integrate(0.5, 1.5).unwrap() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn grids() {
        let g = FrequencyGrid::logarithmic(1.0, 1e4, 5).unwrap();
        let p = g.points();
        assert_eq!(p.len(), 5);
        assert!((p[1] - 10.0).abs() < 1e-12);
        assert!(FrequencyGrid::logarithmic(0.0, 1.0, 4).is_err());
        assert!(FrequencyGrid::linear(0.0, 1.0, 1).is_err());
        let refined = g.points_with_resonances(&[(50.0, 2.0)]);
        assert!(refined.windows(2).all(|w| w[1] > w[0]));
        assert!(refined.iter().filter(|f| (**f - 50.0).abs() <= 1.0).count() >= 20);
    }

    #[test]
    fn addition_checks_units() {
        let a = NoiseSpectrum::flat(lin(3, 2.0), SpectrumUnit::Displacement, 1.0).unwrap();
        let b = NoiseSpectrum::flat(lin(3, 2.0), SpectrumUnit::Force, 1.0).unwrap();
        assert!(matches!(a.add(&b), Err(Error::UnitMismatch { .. })));
    }

    #[test]
    fn csv_format() {
        let s = NoiseSpectrum::new(vec![1e3, 2e3], vec![2.5e-37, 0.0], SpectrumUnit::Displacement)
            .unwrap();
        let text = s.to_csv_string();
        assert!(text.starts_with("# unit=m2/Hz sidedness=one\nfrequency_hz,value\n"));
        assert_eq!(NoiseSpectrum::parse_csv(&text, "mem").unwrap(), s);
        let two = text.replace("sidedness=one", "sidedness=two");
        assert!(NoiseSpectrum::parse_csv(&two, "mem").is_err());
        let with_rbw = s.clone().with_rbw(20.0);
        let back = NoiseSpectrum::parse_csv(&with_rbw.to_csv_string(), "mem").unwrap();
        assert_eq!(back.rbw_hz(), Some(20.0));
    }

    #[test]
    fn loglog_resampling_follows_power_laws() {
        let f = FrequencyGrid::logarithmic(1.0, 1e6, 7).unwrap().points();
        let s = NoiseSpectrum::from_fn(f, SpectrumUnit::Frequency, |f| 1e8 / (f * f)).unwrap();
        let r = s.resample_loglog(&[3.0, 777.0, 123_456.0]).unwrap();
        for (f, v) in r.iter() {
            assert!((v / (1e8 / (f * f)) - 1.0).abs() < 1e-10);
        }
        assert!(s.resample_loglog(&[2e6]).is_err());
    }

    proptest! {
        #[test]
        fn integral_is_additive(vals in prop::collection::vec(0.0f64..10.0, 8),
                                a in 0.0f64..7.0, b in 0.0f64..7.0, c in 0.0f64..7.0) {
            let s = NoiseSpectrum::new(lin(8, 7.0), vals, SpectrumUnit::Dimensionless).unwrap();
            let mut x = [a, b, c];
            x.sort_by(|p, q| p.total_cmp(q));
            let whole = s.integrate(x[0], x[2]).unwrap();
            let parts = s.integrate(x[0], x[1]).unwrap() + s.integrate(x[1], x[2]).unwrap();
            prop_assert!((whole - parts).abs() <= 1e-12 * whole.abs().max(1.0));
        }

        #[test]
        fn asd_squares_back(vals in prop::collection::vec(0.0f64..1e-30, 5)) {
            let s = NoiseSpectrum::new(lin(5, 4.0), vals.clone(), SpectrumUnit::Displacement).unwrap();
            let back = asd_from_psd(&s).unwrap().to_psd().unwrap();
            for (x, y) in back.values().iter().zip(&vals) {
                prop_assert!((x - y).abs() <= 4.0 * f64::EPSILON * y);
            }
        }

        #[test]
        fn addition_commutes(a in prop::collection::vec(0.0f64..1.0, 4),
                             b in prop::collection::vec(0.0f64..1.0, 4)) {
            let sa = NoiseSpectrum::new(lin(4, 3.0), a, SpectrumUnit::Force).unwrap();
            let sb = NoiseSpectrum::new(lin(4, 3.0), b, SpectrumUnit::Force).unwrap();
            prop_assert_eq!(sa.add(&sb).unwrap(), sb.add(&sa).unwrap());
        }

        #[test]
        fn csv_round_trip(vals in prop::collection::vec(0.0f64..1e-20, 1..20)) {
            let n = vals.len();
            let f: Vec<f64> = (0..n).map(|i| 10.0 + i as f64 * 0.1).collect();
            let s = NoiseSpectrum::new(f, vals, SpectrumUnit::Displacement).unwrap();
            prop_assert_eq!(NoiseSpectrum::parse_csv(&s.to_csv_string(), "mem").unwrap(), s);
        }
    }
}
