//! The displacement noise budget: thermal noise of every mode, the
//! shot-noise floor, laser frequency noise and residual-gas index noise on a
//! common frequency grid.
//!
//! Components are independent, so their PSDs add. Sums run in label order,
//! which keeps results bit-identical regardless of how components were
//! supplied.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::cavity::{shot_noise_spectrum, DetectionChain, LaserSource, OpticalCavity};
use crate::mechanics::table::check_unique_labels;
use crate::mechanics::{Environment, MechanicalMode};
use crate::spectrum::{NoiseSpectrum, SpectrumUnit};
use crate::{Error, Result};

pub const THERMAL: &str = "thermal";
pub const SHOT: &str = "shot";
pub const FREQUENCY: &str = "frequency";
pub const GAS: &str = "gas";

/// Optical index noise of the residual gas, scaled from a reference envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct GasNoiseModel {
    reference_envelope: NoiseSpectrum,
    reference_pressure: f64,
    operating_pressure: f64,
    pressure_exponent: f64,
}

impl GasNoiseModel {
    /// Default PSD exponent: index-noise amplitude linear in pressure.
    pub const DEFAULT_EXPONENT: f64 = 2.0;

    pub fn new(
        reference_envelope: NoiseSpectrum,
        reference_pressure: f64,
        operating_pressure: f64,
        pressure_exponent: f64,
    ) -> Result<Self> {
        reference_envelope.require_unit(SpectrumUnit::Displacement)?;
        if !(reference_pressure > 0.0) {
            return Err(Error::validation(
                "reference_pressure_mbar",
                format!("must be > 0, got {reference_pressure}"),
            ));
        }
        if !(operating_pressure > 0.0) {
            return Err(Error::validation(
                "operating_pressure_mbar",
                format!("must be > 0, got {operating_pressure}"),
            ));
        }
        if !pressure_exponent.is_finite() {
            return Err(Error::validation(
                "pressure_exponent",
                format!("must be finite, got {pressure_exponent}"),
            ));
        }
        Ok(Self {
            reference_envelope,
            reference_pressure,
            operating_pressure,
            pressure_exponent,
        })
    }

    pub fn reference_envelope(&self) -> &NoiseSpectrum {
        &self.reference_envelope
    }

    pub fn reference_pressure(&self) -> f64 {
        self.reference_pressure
    }

    pub fn operating_pressure(&self) -> f64 {
        self.operating_pressure
    }

    pub fn pressure_exponent(&self) -> f64 {
        self.pressure_exponent
    }

    /// PSD scale factor (p_op / p_ref)^exponent.
    pub fn pressure_factor(&self) -> f64 {
        (self.operating_pressure / self.reference_pressure).powf(self.pressure_exponent)
    }

    /// The envelope resampled log-log onto `frequencies` and scaled to the
    /// operating pressure. The envelope must span the grid.
    pub fn psd(&self, frequencies: &[f64]) -> Result<NoiseSpectrum> {
        let (lo, hi) = match (frequencies.first(), frequencies.last()) {
            (Some(a), Some(b)) => (*a, *b),
            _ => return Err(Error::Domain("empty frequency grid".to_string())),
        };
        if lo < self.reference_envelope.f_min() || hi > self.reference_envelope.f_max() {
            return Err(Error::Domain(format!(
                "gas envelope spans [{}, {}] Hz but the grid needs [{lo}, {hi}] Hz",
                self.reference_envelope.f_min(),
                self.reference_envelope.f_max()
            )));
        }
        self.reference_envelope
            .resample_loglog(frequencies)?
            .scaled(self.pressure_factor(), SpectrumUnit::Displacement)
    }
}

/// Sum of the single-mode thermal PSDs.
pub fn multimode_thermal(modes: &[MechanicalMode], env: &Environment, frequencies: &[f64]) -> Result<NoiseSpectrum> {
    Ok(thermal_by_mode(modes, env, frequencies)?.1)
}

fn thermal_by_mode(
    modes: &[MechanicalMode],
    env: &Environment,
    frequencies: &[f64],
) -> Result<(BTreeMap<String, NoiseSpectrum>, NoiseSpectrum)> {
    if modes.is_empty() {
        return Err(Error::Domain("multimode thermal noise needs at least one mode".to_string()));
    }
    check_unique_labels(modes)?;
    let per_mode = modes
        .iter()
        .map(|m| Ok((m.label().to_string(), m.thermal_displacement_psd(env, frequencies)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    let total = sum(per_mode.values(), frequencies)?;
    Ok((per_mode, total))
}

fn sum<'a>(spectra: impl Iterator<Item = &'a NoiseSpectrum>, frequencies: &[f64]) -> Result<NoiseSpectrum> {
    let mut acc = NoiseSpectrum::flat(frequencies.to_vec(), SpectrumUnit::Displacement, 0.0)?;
    for s in spectra {
        acc = acc.add(s)?;
    }
    Ok(acc)
}

/// Everything a full budget needs. Absent optional parts are left out.
#[derive(Debug, Clone, Copy)]
pub struct BudgetInputs<'a> {
    pub cavity: &'a OpticalCavity,
    pub laser: &'a LaserSource,
    pub detection: &'a DetectionChain,
    pub environment: &'a Environment,
    pub modes: &'a [MechanicalMode],
    pub gas: Option<&'a GasNoiseModel>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BudgetReport {
    frequencies: Vec<f64>,
    components: BTreeMap<String, NoiseSpectrum>,
    thermal_modes: BTreeMap<String, NoiseSpectrum>,
    total: NoiseSpectrum,
}

impl BudgetReport {
    /// Assemble a report from top-level components sharing one grid.
    pub fn from_components(
        frequencies: &[f64],
        components: BTreeMap<String, NoiseSpectrum>,
        thermal_modes: BTreeMap<String, NoiseSpectrum>,
    ) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Domain("a budget needs at least one component".to_string()));
        }
        for (label, c) in components.iter().chain(&thermal_modes) {
            c.require_unit(SpectrumUnit::Displacement)?;
            if c.frequencies() != frequencies {
                return Err(Error::Domain(format!("component `{label}` is not on the budget grid")));
            }
        }
        let total = sum(components.values(), frequencies)?;
        Ok(Self {
            frequencies: frequencies.to_vec(),
            components,
            thermal_modes,
            total,
        })
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn components(&self) -> &BTreeMap<String, NoiseSpectrum> {
        &self.components
    }

    pub fn component(&self, label: &str) -> Option<&NoiseSpectrum> {
        self.components.get(label)
    }

    pub fn thermal_modes(&self) -> &BTreeMap<String, NoiseSpectrum> {
        &self.thermal_modes
    }

    pub fn total(&self) -> &NoiseSpectrum {
        &self.total
    }

    /// Sum of every component except thermal noise: the readout floor the
    /// thermal peaks stand on.
    pub fn floor(&self) -> Result<NoiseSpectrum> {
        sum(
            self.components
                .iter()
                .filter(|(k, _)| k.as_str() != THERMAL)
                .map(|(_, v)| v),
            &self.frequencies,
        )
    }

    /// Label of the largest component at each grid frequency.
    pub fn dominant(&self) -> Vec<&str> {
        (0..self.frequencies.len())
            .map(|i| {
                self.components
                    .iter()
                    .fold(("", -1.0), |best, (k, v)| {
                        if v.values()[i] > best.1 {
                            (k.as_str(), v.values()[i])
                        } else {
                            best
                        }
                    })
                    .0
            })
            .collect()
    }

    /// Dominant component at the grid point nearest `f`.
    pub fn dominant_at(&self, f: f64) -> &str {
        let i = (0..self.frequencies.len())
            .min_by(|&a, &b| {
                (self.frequencies[a] - f)
                    .abs()
                    .total_cmp(&(self.frequencies[b] - f).abs())
            })
            .unwrap_or(0);
        self.dominant()[i]
    }

    /// Per-decade summary: the component carrying the most variance in each
    /// decade, and the total rms displacement there.
    pub fn summary_text(&self) -> String {
        let mut out = String::from("# decade_lo_hz decade_hi_hz dominant total_rms_m\n");
        let (lo, hi) = (self.total.f_min().max(f64::MIN_POSITIVE), self.total.f_max());
        let mut d = lo.log10().floor() as i32;
        while 10f64.powi(d) < hi {
            let (a, b) = (10f64.powi(d).max(lo), 10f64.powi(d + 1).min(hi));
            if b > a {
                let mut best = ("", -1.0);
                for (k, v) in &self.components {
                    let var = v.integrate(a, b).unwrap_or(0.0);
                    if var > best.1 {
                        best = (k.as_str(), var);
                    }
                }
                let rms = self.total.integrate(a, b).unwrap_or(0.0).sqrt();
                let _ = writeln!(out, "{:e} {:e} {} {:.6e}", 10f64.powi(d), 10f64.powi(d + 1), best.0, rms);
            }
            d += 1;
        }
        out
    }

    /// Write `<component>.csv`, `thermal_<mode>.csv` and `total.csv` into
    /// `dir`; returns the written paths.
    pub fn write_csvs(&self, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
        let dir = dir.as_ref();
        let mut written = Vec::new();
        let mut emit = |name: String, spec: &NoiseSpectrum| -> Result<()> {
            let path = dir.join(name);
            spec.write_csv(&path)?;
            written.push(path);
            Ok(())
        };
        for (k, v) in &self.components {
            emit(format!("{}.csv", file_stem(k)), v)?;
        }
        for (k, v) in &self.thermal_modes {
            emit(format!("thermal_{}.csv", file_stem(k)), v)?;
        }
        emit("total.csv".to_string(), &self.total)?;
        Ok(written)
    }

    pub fn write_summary(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.summary_text()).map_err(|e| Error::io(path, e))
    }
}

/// A label made safe for use in a file name.
pub fn file_stem(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
        .collect()
}

/// Compose the full budget on `frequencies`.
///
/// Frequency noise is included when the laser carries an envelope, gas
/// noise when a model is given.
pub fn compose_budget(inputs: &BudgetInputs<'_>, frequencies: &[f64]) -> Result<BudgetReport> {
    let mut components = BTreeMap::new();
    let (per_mode, thermal) = thermal_by_mode(inputs.modes, inputs.environment, frequencies)?;
    components.insert(THERMAL.to_string(), thermal);
    components.insert(
        SHOT.to_string(),
        shot_noise_spectrum(inputs.cavity, inputs.laser, inputs.detection, frequencies)?,
    );
    if let Some(envelope) = inputs.laser.frequency_noise() {
        let (lo, hi) = (frequencies[0], frequencies[frequencies.len() - 1]);
        if lo < envelope.f_min() || hi > envelope.f_max() {
            return Err(Error::Domain(format!(
                "frequency-noise envelope spans [{}, {}] Hz but the grid needs [{lo}, {hi}] Hz",
                envelope.f_min(),
                envelope.f_max()
            )));
        }
        let on_grid = envelope.resample_loglog(frequencies)?;
        components.insert(
            FREQUENCY.to_string(),
            inputs
                .cavity
                .frequency_noise_to_displacement(inputs.laser.carrier_frequency(), &on_grid)?,
        );
    }
    if let Some(gas) = inputs.gas {
        components.insert(GAS.to_string(), gas.psd(frequencies)?);
    }
    BudgetReport::from_components(frequencies, components, per_mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cavity::shot_noise_floor;
    use crate::spectrum::FrequencyGrid;

    fn envelope(level: f64) -> NoiseSpectrum {
        NoiseSpectrum::flat(vec![1.0, 1e8], SpectrumUnit::Displacement, level).unwrap()
    }

    #[test]
    fn gas_pressure_scaling() {
        let f = [1e3, 1e5, 1e6];
        let same = GasNoiseModel::new(envelope(3e-36), 1e3, 1e3, 2.0).unwrap();
        assert_eq!(same.psd(&f).unwrap().values(), &[3e-36; 3]);
        let g = GasNoiseModel::new(envelope(1e-36), 1000.0, 1e-2, 2.0).unwrap();
        for v in g.psd(&f).unwrap().values() {
            assert!((v / 1e-46 - 1.0).abs() < 1e-9);
        }
        let ratio = GasNoiseModel::new(envelope(1.0), 1.0, 1e-5, 2.0).unwrap();
        assert!((ratio.pressure_factor() / 1e-10 - 1.0).abs() < 1e-12);
        assert!(g.psd(&[0.5, 10.0]).is_err());
        assert!(GasNoiseModel::new(envelope(1.0), 0.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn gas_resampling_is_loglog() {
        let env = NoiseSpectrum::new(vec![1.0, 100.0], vec![1e-30, 1e-34], SpectrumUnit::Displacement).unwrap();
        let g = GasNoiseModel::new(env, 1.0, 1.0, 2.0).unwrap();
        let v = g.psd(&[10.0]).unwrap().values()[0];
        assert!((v / 1e-32 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn multimode_sums() {
        let env = Environment::room_temperature();
        let a = MechanicalMode::new("a", 1e5, 1e-8, 1e3).unwrap();
        let b = MechanicalMode::new("b", 1e6, 1e-9, 1e3).unwrap();
        let grid = FrequencyGrid::logarithmic(10.0, 1e8, 2000).unwrap();
        let f = grid.points_with_resonances(&[(1e5, 100.0), (1e6, 1e3)]);
        let single = multimode_thermal(std::slice::from_ref(&a), &env, &f).unwrap();
        assert_eq!(single, a.thermal_displacement_psd(&env, &f).unwrap());
        let both = multimode_thermal(&[a.clone(), b.clone()], &env, &f).unwrap();
        let pa = both.value_at(1e5).unwrap() / a.thermal_psd_at(&env, 1e5);
        let pb = both.value_at(1e6).unwrap() / b.thermal_psd_at(&env, 1e6);
        assert!((pa - 1.0).abs() < 1e-3 && (pb - 1.0).abs() < 1e-3);
        let expected = a.thermal_variance(&env) + b.thermal_variance(&env);
        assert!((both.total_variance() / expected - 1.0).abs() < 0.01);
        let dup = MechanicalMode::new("a", 2e5, 1e-8, 1e3).unwrap();
        assert!(matches!(multimode_thermal(&[a, dup], &env, &f), Err(Error::Config(_))));
        assert!(multimode_thermal(&[], &env, &f).is_err());
    }

    #[test]
    fn shot_only_total_is_shot() {
        let cavity = OpticalCavity::reference();
        let laser = LaserSource::new(1.5e-3, 1.064e-6, 0.6626, 12e6).unwrap();
        let chain = DetectionChain::new(0.91, 0.93).unwrap();
        let f = FrequencyGrid::logarithmic(1e4, 1e7, 50).unwrap().points();
        let shot = shot_noise_spectrum(&cavity, &laser, &chain, &f).unwrap();
        let mut c = BTreeMap::new();
        c.insert(SHOT.to_string(), shot.clone());
        let report = BudgetReport::from_components(&f, c, BTreeMap::new()).unwrap();
        assert_eq!(report.total().values(), shot.values());
        let x = shot_noise_floor(&cavity, &laser, &chain, f[10]).unwrap();
        assert!((report.total().values()[10].sqrt() / x - 1.0).abs() < 1e-15);
    }

    #[test]
    fn composition_properties() {
        let cavity = OpticalCavity::reference();
        let laser = LaserSource::new(1.5e-3, 1.064e-6, 0.6626, 12e6).unwrap();
        let chain = DetectionChain::new(0.91, 0.93).unwrap();
        let env = Environment::room_temperature();
        let modes = [MechanicalMode::reference()];
        let gas = GasNoiseModel::new(envelope(1e-36), 1e3, 1e-2, 2.0).unwrap();
        let f = FrequencyGrid::logarithmic(1e4, 1e7, 300)
            .unwrap()
            .points_with_resonances(&[(814e3, 81.4)]);
        let inputs = BudgetInputs {
            cavity: &cavity,
            laser: &laser,
            detection: &chain,
            environment: &env,
            modes: &modes,
            gas: Some(&gas),
        };
        let full = compose_budget(&inputs, &f).unwrap();
        let no_gas = compose_budget(&BudgetInputs { gas: None, ..inputs }, &f).unwrap();
        for i in 0..f.len() {
            let t = full.total().values()[i];
            assert!(full.components().values().all(|c| c.values()[i] <= t));
            assert!(no_gas.total().values()[i] <= t);
        }
        assert_eq!(full.dominant_at(814e3), THERMAL);
        assert_eq!(full.dominant_at(3e6), SHOT);
        let text = full.summary_text();
        assert!(text.lines().count() == 4, "{text}");
        assert!(text.contains("1e5 1e6 thermal"));
    }
}
