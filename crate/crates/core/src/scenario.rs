//! Scenario files.
//!
//! A scenario is a TOML document with one table per subsystem. Every
//! physical quantity carries its unit in the key name (`_hz`, `_kg`, `_w`,
//! `_m`, `_mbar`, `_k`), and unknown keys are rejected so that a typo in a
//! parameter name cannot silently fall back to a default.
//!
//! Relative file references resolve against the directory holding the
//! scenario. [`ScenarioConfig::resolved_toml`] echoes the fully resolved
//! configuration (defaults filled in, paths absolute, mode tables inlined);
//! loading that dump yields the same [`Scenario`].

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::budget::GasNoiseModel;
use crate::cavity::{shot_noise_floor, DetectionChain, LaserSource, OpticalCavity};
use crate::dsp::FitModel;
use crate::feedback::FeedbackController;
use crate::mechanics::table::{check_unique_labels, read_mode_shape, read_mode_table};
use crate::mechanics::{clamped_beam_mode_shape, Environment, MechanicalMode, ModeShape};
use crate::spectrum::{FrequencyGrid, GridSpacing, NoiseSpectrum, SpectrumUnit};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub seed: u64,
    /// Mode table in CSV form; merged with any inline `[[modes]]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes_csv: Option<PathBuf>,
    pub cavity: CavityConfig,
    pub laser: LaserConfig,
    pub detection: DetectionConfig,
    #[serde(default)]
    pub environment: EnvironmentConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub outputs: OutputsConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub modes: Vec<ModeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gas: Option<GasConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feedback: Option<FeedbackConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<ShapeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthesis: Option<SynthesisConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct CavityConfig {
    pub length_m: f64,
    pub input_transmission_T: f64,
    pub round_trip_loss_L: f64,
    pub wavelength_m: f64,
    pub waist_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaserConfig {
    pub power_w: f64,
    pub modulation_index: f64,
    pub sideband_frequency_hz: f64,
    /// Frequency-noise envelope (Hz²/Hz spectrum CSV).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequency_noise_csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionConfig {
    pub mode_matching_eta: f64,
    pub detection_efficiency_eta_ph: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentConfig {
    #[serde(default = "default_temperature")]
    pub temperature_k: f64,
}

fn default_temperature() -> f64 {
    300.0
}

impl Default for EnvironmentConfig {
    fn default() -> Self {
        Self {
            temperature_k: default_temperature(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    pub label: String,
    pub f_m_hz: f64,
    pub m_eff_kg: f64,
    pub q: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fem_f_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fem_m_kg: Option<f64>,
}

impl ModeConfig {
    fn build(&self) -> Result<MechanicalMode> {
        let mode = MechanicalMode::new(self.label.clone(), self.f_m_hz, self.m_eff_kg, self.q)?;
        match (self.fem_f_hz, self.fem_m_kg) {
            (Some(f), Some(m)) => Ok(mode.with_fem_prediction(f, m)),
            (None, None) => Ok(mode),
            _ => Err(Error::validation(
                "fem_f_hz",
                format!("mode `{}`: give both fem_f_hz and fem_m_kg or neither", self.label),
            )),
        }
    }

    fn from_mode(mode: &MechanicalMode) -> Self {
        Self {
            label: mode.label().to_string(),
            f_m_hz: mode.resonance_frequency(),
            m_eff_kg: mode.effective_mass(),
            q: mode.quality_factor(),
            fem_f_hz: mode.fem_prediction().map(|p| p.0),
            fem_m_kg: mode.fem_prediction().map(|p| p.1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Log,
    Lin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub f_min_hz: f64,
    pub f_max_hz: f64,
    pub n_points: usize,
    pub spacing: Spacing,
}

impl GridConfig {
    pub fn build(&self) -> Result<FrequencyGrid> {
        let spacing = match self.spacing {
            Spacing::Log => GridSpacing::Logarithmic,
            Spacing::Lin => GridSpacing::Linear,
        };
        FrequencyGrid::new(self.f_min_hz, self.f_max_hz, self.n_points, spacing)
            .map_err(|e| Error::validation("grid", e.to_string()))
    }
}

/// `f_min,f_max,n,log|lin`, as accepted on the command line.
impl FromStr for GridConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: String| Error::validation("grid", m);
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(bad(format!("expected f_min,f_max,n,log|lin, got `{s}`")));
        }
        let num = |t: &str| t.parse::<f64>().map_err(|e| bad(format!("bad number `{t}`: {e}")));
        let spacing = match parts[3] {
            "log" => Spacing::Log,
            "lin" => Spacing::Lin,
            other => return Err(bad(format!("spacing must be log or lin, got `{other}`"))),
        };
        let config = GridConfig {
            f_min_hz: num(parts[0])?,
            f_max_hz: num(parts[1])?,
            n_points: parts[2]
                .parse()
                .map_err(|e| bad(format!("bad point count `{}`: {e}", parts[2])))?,
            spacing,
        };
        config.build()?;
        Ok(config)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsConfig {
    /// Emit `thermal_<mode>.csv` next to the summed thermal component.
    #[serde(default = "yes")]
    pub per_mode_thermal: bool,
    /// Also write synthesized records as `timeseries.csv`.
    #[serde(default)]
    pub timeseries_csv: bool,
}

fn yes() -> bool {
    true
}

impl Default for OutputsConfig {
    fn default() -> Self {
        Self {
            per_mode_thermal: true,
            timeseries_csv: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GasConfig {
    /// Displacement-equivalent envelope measured at the reference pressure.
    pub envelope_csv: PathBuf,
    pub reference_pressure_mbar: f64,
    #[serde(default = "default_operating_pressure")]
    pub operating_pressure_mbar: f64,
    #[serde(default = "default_exponent")]
    pub pressure_exponent: f64,
}

fn default_operating_pressure() -> f64 {
    1e-2
}

fn default_exponent() -> f64 {
    GasNoiseModel::DEFAULT_EXPONENT
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeedbackConfig {
    /// Label of the damped mode; the first mode when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    pub gains: Vec<f64>,
    #[serde(default = "yes")]
    pub enabled: bool,
    /// Explicit imprecision PSD, m²/Hz. Absent means an ideal loop unless
    /// `imprecision_from_shot_floor` is set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub imprecision_psd_m2_hz: Option<f64>,
    /// Use the shot-noise floor at the mode frequency as imprecision.
    #[serde(default)]
    pub imprecision_from_shot_floor: bool,
    /// Also search the optimum gain up to this value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimize_up_to_gain: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeConfig {
    /// Analytic clamped-clamped beam mode number.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beam_mode_index: Option<usize>,
    /// Imported grid (`x_m,y_m,u`) instead of the analytic shape.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default = "default_beam_size")]
    pub beam_length_m: f64,
    #[serde(default = "default_beam_size")]
    pub beam_width_m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub areal_density_kg_m2: Option<f64>,
    #[serde(default = "default_nx")]
    pub nx: usize,
    #[serde(default = "default_ny")]
    pub ny: usize,
    /// Spot waist; the cavity waist when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub waist_m: Option<f64>,
    /// Lateral line of the scan; the middle of the shape when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan_y_m: Option<f64>,
    #[serde(default = "default_scan_points")]
    pub scan_points: usize,
}

fn default_beam_size() -> f64 {
    1e-3
}

fn default_nx() -> usize {
    201
}

fn default_ny() -> usize {
    101
}

fn default_scan_points() -> usize {
    101
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SynthesisModel {
    /// Total of the noise budget.
    Budget,
    /// Thermal noise of the selected mode alone.
    Thermal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthesisConfig {
    pub sample_rate_hz: f64,
    pub duration_s: f64,
    #[serde(default = "default_rbw")]
    pub rbw_hz: f64,
    #[serde(default = "default_synthesis_model")]
    pub model: SynthesisModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
}

fn default_rbw() -> f64 {
    20.0
}

fn default_synthesis_model() -> SynthesisModel {
    SynthesisModel::Budget
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitModelConfig {
    Lorentzian,
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    /// Fit this spectrum CSV instead of a synthesized record.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum_csv: Option<PathBuf>,
    /// Fit window half-width in (closed-loop) linewidths.
    #[serde(default = "default_half_width")]
    pub half_width_linewidths: f64,
    #[serde(default = "default_fit_model")]
    pub model: FitModelConfig,
}

fn default_half_width() -> f64 {
    15.0
}

fn default_fit_model() -> FitModelConfig {
    FitModelConfig::Lorentzian
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            mode: None,
            spectrum_csv: None,
            half_width_linewidths: default_half_width(),
            model: default_fit_model(),
        }
    }
}

impl ScenarioConfig {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e: toml::de::Error| {
            let at = e.span().map_or(0, |s| s.start).min(text.len());
            let line = text[..at].matches('\n').count() + 1;
            let column = at - text[..at].rfind('\n').map_or(0, |i| i + 1) + 1;
            Error::Parse {
                path: origin.to_string(),
                message: format!("line {line}, column {column}: {}", e.message()),
            }
        })
    }

    /// Read a scenario file, resolve relative paths and inline mode tables.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::parse(&text, &path.display().to_string())?;
        let base = std::path::absolute(path)
            .map_err(|e| Error::io(path, e))?
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_default();
        config.resolve_paths(&base)?;
        Ok(config)
    }

    fn resolve_paths(&mut self, base: &Path) -> Result<()> {
        let fix = |p: &mut PathBuf| -> Result<()> {
            if p.is_relative() {
                *p = base.join(&*p);
            }
            if !p.is_file() {
                return Err(Error::Config(format!("referenced file {} does not exist", p.display())));
            }
            Ok(())
        };
        if let Some(p) = self.laser.frequency_noise_csv.as_mut() {
            fix(p)?;
        }
        if let Some(g) = self.gas.as_mut() {
            fix(&mut g.envelope_csv)?;
        }
        if let Some(p) = self.shape.as_mut().and_then(|s| s.csv.as_mut()) {
            fix(p)?;
        }
        if let Some(p) = self.fit.as_mut().and_then(|f| f.spectrum_csv.as_mut()) {
            fix(p)?;
        }
        if let Some(mut p) = self.modes_csv.take() {
            fix(&mut p)?;
            let table = read_mode_table(&p)?;
            self.modes.extend(table.iter().map(ModeConfig::from_mode));
        }
        Ok(())
    }

    /// The configuration as TOML with every default spelled out.
    pub fn resolved_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(format!("cannot serialize configuration: {e}")))
    }
}

/// Feedback settings of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackSettings {
    pub mode: MechanicalMode,
    pub gains: Vec<f64>,
    /// Gain-free template: carries the imprecision and enabled flag.
    pub controller: FeedbackController,
    pub optimize_up_to_gain: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeSettings {
    pub shape: ModeShape,
    pub waist: f64,
    pub scan_y: f64,
    pub scan_points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisSettings {
    pub sample_rate: f64,
    pub duration: f64,
    pub rbw: f64,
    pub model: SynthesisModel,
    pub mode: MechanicalMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitSettings {
    pub mode: MechanicalMode,
    pub spectrum: Option<NoiseSpectrum>,
    pub half_width_linewidths: f64,
    pub model: FitModel,
}

/// A validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub cavity: OpticalCavity,
    pub laser: LaserSource,
    pub detection: DetectionChain,
    pub environment: Environment,
    pub modes: Vec<MechanicalMode>,
    pub gas: Option<GasNoiseModel>,
    pub feedback: Option<FeedbackSettings>,
    pub grid: FrequencyGrid,
    pub shape: Option<ShapeSettings>,
    pub synthesis: Option<SynthesisSettings>,
    pub fit: Option<FitSettings>,
    pub outputs: OutputsConfig,
    pub seed: u64,
    config: ScenarioConfig,
}

fn select_mode(modes: &[MechanicalMode], label: Option<&str>, section: &str) -> Result<MechanicalMode> {
    match label {
        Some(l) => modes.iter().find(|m| m.label() == l).cloned().ok_or_else(|| {
            Error::validation("mode", format!("[{section}] names unknown mode `{l}`"))
        }),
        None => modes.first().cloned().ok_or_else(|| Error::MissingSection {
            section: "modes".to_string(),
            message: format!("[{section}] needs at least one mechanical mode"),
        }),
    }
}

impl Scenario {
    /// Validate a configuration whose paths are already resolved.
    pub fn from_config(config: ScenarioConfig) -> Result<Self> {
        let c = &config.cavity;
        let cavity = OpticalCavity::new(
            c.length_m,
            c.input_transmission_T,
            c.round_trip_loss_L,
            c.wavelength_m,
            c.waist_m,
        )?;
        let l = &config.laser;
        let mut laser = LaserSource::new(l.power_w, c.wavelength_m, l.modulation_index, l.sideband_frequency_hz)?;
        if let Some(p) = &l.frequency_noise_csv {
            let envelope = NoiseSpectrum::read_csv(p)?;
            laser = laser.with_frequency_noise(envelope)?;
        }
        let detection = DetectionChain::new(
            config.detection.mode_matching_eta,
            config.detection.detection_efficiency_eta_ph,
        )?;
        let environment = Environment::new(config.environment.temperature_k)?;
        let modes = config.modes.iter().map(ModeConfig::build).collect::<Result<Vec<_>>>()?;
        check_unique_labels(&modes)?;
        let grid = config.grid.build()?;

        let gas = match &config.gas {
            Some(g) => Some(GasNoiseModel::new(
                NoiseSpectrum::read_csv(&g.envelope_csv)?,
                g.reference_pressure_mbar,
                g.operating_pressure_mbar,
                g.pressure_exponent,
            )?),
            None => None,
        };

        let feedback = match &config.feedback {
            Some(f) => {
                let mode = select_mode(&modes, f.mode.as_deref(), "feedback")?;
                let s_imp = match (f.imprecision_psd_m2_hz, f.imprecision_from_shot_floor) {
                    (Some(_), true) => {
                        return Err(Error::validation(
                            "imprecision_psd_m2_hz",
                            "conflicts with imprecision_from_shot_floor = true",
                        ))
                    }
                    (Some(v), false) => v,
                    (None, true) => shot_noise_floor(&cavity, &laser, &detection, mode.resonance_frequency())?.powi(2),
                    (None, false) => 0.0,
                };
                let mut controller = FeedbackController::new(0.0, s_imp)?;
                if !f.enabled {
                    controller = controller.disabled();
                }
                for &g in &f.gains {
                    FeedbackController::new(g, s_imp)?;
                }
                if f.gains.windows(2).any(|w| !(w[1] >= w[0])) {
                    return Err(Error::validation("gains", "must be sorted ascending"));
                }
                if let Some(g) = f.optimize_up_to_gain {
                    if !(g > 0.0) {
                        return Err(Error::validation("optimize_up_to_gain", format!("must be > 0, got {g}")));
                    }
                }
                Some(FeedbackSettings {
                    mode,
                    gains: f.gains.clone(),
                    controller,
                    optimize_up_to_gain: f.optimize_up_to_gain,
                })
            }
            None => None,
        };

        let shape = match &config.shape {
            Some(s) => {
                let shape = match (s.beam_mode_index, &s.csv) {
                    (Some(n), None) => {
                        let areal = s.areal_density_kg_m2.ok_or_else(|| {
                            Error::validation("areal_density_kg_m2", "required for an analytic beam shape")
                        })?;
                        clamped_beam_mode_shape(n, s.beam_length_m, s.beam_width_m, areal, s.nx, s.ny)?
                    }
                    (None, Some(p)) => read_mode_shape(p)?,
                    _ => {
                        return Err(Error::validation(
                            "beam_mode_index",
                            "[shape] needs exactly one of beam_mode_index or csv",
                        ))
                    }
                };
                let waist = s.waist_m.unwrap_or(c.waist_m);
                if !(waist > 0.0) {
                    return Err(Error::validation("waist_m", format!("must be > 0, got {waist}")));
                }
                let (_, (y0, y1)) = shape.extent();
                let scan_y = s.scan_y_m.unwrap_or(0.5 * (y0 + y1));
                if !(scan_y >= y0 && scan_y <= y1) {
                    return Err(Error::validation("scan_y_m", format!("{scan_y} m lies outside the shape")));
                }
                if s.scan_points < 2 {
                    return Err(Error::validation("scan_points", "need at least 2"));
                }
                Some(ShapeSettings {
                    shape,
                    waist,
                    scan_y,
                    scan_points: s.scan_points,
                })
            }
            None => None,
        };

        let synthesis = match &config.synthesis {
            Some(s) => {
                if !(s.sample_rate_hz > 0.0) {
                    return Err(Error::validation("sample_rate_hz", format!("must be > 0, got {}", s.sample_rate_hz)));
                }
                if !(s.duration_s > 0.0) {
                    return Err(Error::validation("duration_s", format!("must be > 0, got {}", s.duration_s)));
                }
                if !(s.rbw_hz > 0.0) {
                    return Err(Error::validation("rbw_hz", format!("must be > 0, got {}", s.rbw_hz)));
                }
                Some(SynthesisSettings {
                    sample_rate: s.sample_rate_hz,
                    duration: s.duration_s,
                    rbw: s.rbw_hz,
                    model: s.model,
                    mode: select_mode(&modes, s.mode.as_deref(), "synthesis")?,
                })
            }
            None => None,
        };

        let fit_config = config.fit.clone().unwrap_or_default();
        let fit = if config.fit.is_some() || !modes.is_empty() {
            if !(fit_config.half_width_linewidths > 0.0) {
                return Err(Error::validation(
                    "half_width_linewidths",
                    format!("must be > 0, got {}", fit_config.half_width_linewidths),
                ));
            }
            let spectrum = match &fit_config.spectrum_csv {
                Some(p) => Some(NoiseSpectrum::read_csv(p)?),
                None => None,
            };
            if let Some(s) = &spectrum {
                s.require_unit(SpectrumUnit::Displacement)?;
            }
            Some(FitSettings {
                mode: select_mode(&modes, fit_config.mode.as_deref(), "fit")?,
                spectrum,
                half_width_linewidths: fit_config.half_width_linewidths,
                model: match fit_config.model {
                    FitModelConfig::Lorentzian => FitModel::Lorentzian,
                    FitModelConfig::Exact => FitModel::ExactSusceptibility,
                },
            })
        } else {
            None
        };

        Ok(Self {
            cavity,
            laser,
            detection,
            environment,
            modes,
            gas,
            feedback,
            grid,
            shape,
            synthesis,
            fit,
            outputs: config.outputs.clone(),
            seed: config.seed,
            config,
        })
    }

    /// The resolved configuration this scenario was built from.
    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn resolved_toml(&self) -> Result<String> {
        self.config.resolved_toml()
    }

    /// Rebuild with a different seed.
    pub fn with_seed(&self, seed: u64) -> Result<Self> {
        let mut config = self.config.clone();
        config.seed = seed;
        Self::from_config(config)
    }

    /// Rebuild with a different analysis grid.
    pub fn with_grid(&self, grid: GridConfig) -> Result<Self> {
        let mut config = self.config.clone();
        config.grid = grid;
        Self::from_config(config)
    }

    pub fn mode(&self, label: &str) -> Option<&MechanicalMode> {
        self.modes.iter().find(|m| m.label() == label)
    }

    /// Budget grid points refined around every mode.
    pub fn budget_frequencies(&self) -> Vec<f64> {
        let resonances: Vec<(f64, f64)> = self
            .modes
            .iter()
            .map(|m| (m.resonance_frequency(), m.linewidth()))
            .collect();
        self.grid.points_with_resonances(&resonances)
    }
}

/// Load, resolve and validate a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    Scenario::from_config(ScenarioConfig::load(path)?)
}
