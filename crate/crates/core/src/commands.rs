//! The five scenario commands and their file outputs.
//!
//! Every command writes into one output directory, re-reads what it wrote
//! to validate it, and finishes with `manifest.txt`: one
//! `file,bytes,sha256` row per emitted file, sorted by name. Outputs depend
//! only on the resolved scenario and seed, so two runs give byte-identical
//! manifests.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::budget::{compose_budget, BudgetInputs, BudgetReport};
use crate::dsp::{
    equipartition_temperature, fit_lorentzian_with, synthesize_from_fn, synthesize_timeseries, welch, FitOptions,
    LorentzianFit, TimeSeries, WelchEstimate,
};
use crate::feedback::{gain_sweep, optimal_gain, optimal_gain_analytic, CoolingResult};
use crate::mechanics::{overlap_scan, scan_line, ScanPoint};
use crate::scenario::{Scenario, SynthesisModel, SynthesisSettings};
use crate::spectrum::{FrequencyGrid, NoiseSpectrum};
use crate::{Error, Result};

pub const MANIFEST: &str = "manifest.txt";
pub const RESOLVED_CONFIG: &str = "resolved_config.toml";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Budget,
    Cool,
    Scan,
    Fit,
    Synth,
}

impl Command {
    pub const ALL: [Command; 5] = [Command::Budget, Command::Cool, Command::Scan, Command::Fit, Command::Synth];

    pub fn name(self) -> &'static str {
        match self {
            Command::Budget => "budget",
            Command::Cool => "cool",
            Command::Scan => "scan",
            Command::Fit => "fit",
            Command::Synth => "synth",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown command `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub file: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    pub out_dir: PathBuf,
    /// Emitted files, sorted, excluding the manifest itself.
    pub entries: Vec<ManifestEntry>,
}

impl RunOutcome {
    pub fn manifest_path(&self) -> PathBuf {
        self.out_dir.join(MANIFEST)
    }

    pub fn file(&self, name: &str) -> Option<PathBuf> {
        self.entries
            .iter()
            .any(|e| e.file == name)
            .then(|| self.out_dir.join(name))
    }
}

/// What a written file holds, for read-back validation.
enum Kind {
    Text,
    Spectrum(Box<NoiseSpectrum>),
    Table { columns: usize },
    Series(Box<TimeSeries>),
}

struct Emitter {
    dir: PathBuf,
    files: Vec<(String, Kind)>,
}

impl Emitter {
    fn write(&mut self, name: &str, contents: &[u8], kind: Kind) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        self.files.push((name.to_string(), kind));
        Ok(())
    }

    fn text(&mut self, name: &str, contents: String) -> Result<()> {
        self.write(name, contents.as_bytes(), Kind::Text)
    }

    fn table(&mut self, name: &str, contents: String) -> Result<()> {
        let columns = contents
            .lines()
            .find(|l| !l.starts_with('#'))
            .map_or(0, |h| h.split(',').count());
        self.write(name, contents.as_bytes(), Kind::Table { columns })
    }

    fn spectrum(&mut self, name: &str, spectrum: &NoiseSpectrum) -> Result<()> {
        self.write(name, spectrum.to_csv_string().as_bytes(), Kind::Spectrum(Box::new(spectrum.clone())))
    }

    fn series(&mut self, name: &str, series: &TimeSeries) -> Result<()> {
        self.write(name, &series.to_bytes(), Kind::Series(Box::new(series.clone())))
    }

    /// Re-read every file, then write the manifest.
    fn finish(self) -> Result<RunOutcome> {
        let mut entries = Vec::with_capacity(self.files.len());
        for (name, kind) in &self.files {
            let path = self.dir.join(name);
            let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
            validate(&path, &bytes, kind)?;
            entries.push(ManifestEntry {
                file: name.clone(),
                bytes: bytes.len() as u64,
                sha256: hex::encode(Sha256::digest(&bytes)),
            });
        }
        entries.sort_by(|a, b| a.file.cmp(&b.file));
        let mut manifest = String::from("file,bytes,sha256\n");
        for e in &entries {
            let _ = writeln!(manifest, "{},{},{}", e.file, e.bytes, e.sha256);
        }
        let path = self.dir.join(MANIFEST);
        fs::write(&path, manifest).map_err(|e| Error::io(&path, e))?;
        Ok(RunOutcome {
            out_dir: self.dir,
            entries,
        })
    }
}

fn validate(path: &Path, bytes: &[u8], kind: &Kind) -> Result<()> {
    let origin = path.display().to_string();
    let corrupt = |message: String| Error::Parse {
        path: origin.clone(),
        message: format!("output failed validation: {message}"),
    };
    let text = || std::str::from_utf8(bytes).map_err(|_| corrupt("not UTF-8".to_string()));
    match kind {
        Kind::Text => {
            if text()?.trim().is_empty() {
                return Err(corrupt("empty".to_string()));
            }
        }
        Kind::Spectrum(expected) => {
            let back = NoiseSpectrum::parse_csv(text()?, &origin)?;
            if back != **expected {
                return Err(corrupt("spectrum does not round-trip".to_string()));
            }
        }
        Kind::Table { columns } => {
            let mut rows = text()?.lines().filter(|l| !l.starts_with('#')).skip(1).peekable();
            if rows.peek().is_none() {
                return Err(corrupt("table has no rows".to_string()));
            }
            for row in rows {
                if row.split(',').count() != *columns {
                    return Err(corrupt(format!("row `{row}` does not have {columns} columns")));
                }
            }
        }
        Kind::Series(expected) => {
            let back = TimeSeries::from_bytes(bytes, &origin)?;
            if back != **expected {
                return Err(corrupt("time series does not round-trip".to_string()));
            }
        }
    }
    Ok(())
}

fn missing(section: &str, command: Command, what: &str) -> Error {
    Error::MissingSection {
        section: section.to_string(),
        message: format!("`{command}` needs {what}"),
    }
}

/// Run `command` and write its outputs plus the manifest into `out_dir`,
/// creating it if needed.
pub fn run_command(scenario: &Scenario, command: Command, out_dir: impl AsRef<Path>) -> Result<RunOutcome> {
    let dir = out_dir.as_ref().to_path_buf();
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut out = Emitter {
        dir,
        files: Vec::new(),
    };
    out.text(RESOLVED_CONFIG, scenario.resolved_toml()?)?;
    match command {
        Command::Budget => budget(scenario, &mut out)?,
        Command::Cool => cool(scenario, &mut out)?,
        Command::Scan => scan(scenario, &mut out)?,
        Command::Fit => fit(scenario, &mut out)?,
        Command::Synth => synth(scenario, &mut out)?,
    }
    out.finish()
}

/// The noise budget of a scenario on its (resonance-refined) grid.
pub fn scenario_budget(scenario: &Scenario, frequencies: &[f64]) -> Result<BudgetReport> {
    if scenario.modes.is_empty() {
        return Err(missing("modes", Command::Budget, "at least one mechanical mode"));
    }
    let inputs = BudgetInputs {
        cavity: &scenario.cavity,
        laser: &scenario.laser,
        detection: &scenario.detection,
        environment: &scenario.environment,
        modes: &scenario.modes,
        gas: scenario.gas.as_ref(),
    };
    compose_budget(&inputs, frequencies)
}

fn budget(scenario: &Scenario, out: &mut Emitter) -> Result<()> {
    let report = scenario_budget(scenario, &scenario.budget_frequencies())?;
    for (label, spectrum) in report.components() {
        out.spectrum(&format!("{}.csv", crate::budget::file_stem(label)), spectrum)?;
    }
    if scenario.outputs.per_mode_thermal {
        for (label, spectrum) in report.thermal_modes() {
            out.spectrum(&format!("thermal_{}.csv", crate::budget::file_stem(label)), spectrum)?;
        }
    }
    out.spectrum("total.csv", report.total())?;
    out.text("budget_summary.txt", report.summary_text())
}

/// Gain sweep of the configured feedback loop.
pub fn scenario_cooling(scenario: &Scenario) -> Result<Vec<CoolingResult>> {
    let fb = scenario
        .feedback
        .as_ref()
        .ok_or_else(|| missing("feedback", Command::Cool, "a feedback loop with a gain list"))?;
    gain_sweep(&fb.mode, &scenario.environment, &fb.controller, &fb.gains, &scenario.grid)
}

fn cool(scenario: &Scenario, out: &mut Emitter) -> Result<()> {
    let results = scenario_cooling(scenario)?;
    let fb = scenario.feedback.as_ref().expect("checked by scenario_cooling");
    let mut summary = String::from("gain,t_eff_k,linewidth_hz,area_m2\n");
    for r in &results {
        let _ = writeln!(
            summary,
            "{:e},{:e},{:e},{:e}",
            r.gain, r.effective_temperature, r.effective_linewidth, r.area
        );
        out.spectrum(&format!("true_motion_g{}.csv", r.gain), &r.true_motion)?;
        out.spectrum(&format!("in_loop_g{}.csv", r.gain), &r.in_loop)?;
    }
    out.table("cooling_summary.csv", summary)?;
    if let Some(g_max) = fb.optimize_up_to_gain {
        let s_imp = fb.controller.imprecision_psd();
        let best = optimal_gain(&fb.mode, &scenario.environment, s_imp, g_max)?;
        let closed_form = optimal_gain_analytic(&fb.mode, &scenario.environment, s_imp);
        let mut text = String::from("method,gain,t_eff_k\n");
        let _ = writeln!(text, "numeric,{:e},{:e}", best.gain, best.temperature);
        let _ = writeln!(text, "closed_form,{closed_form:e},");
        out.write("cooling_optimum.csv", text.as_bytes(), Kind::Text)?;
    }
    Ok(())
}

fn scan(scenario: &Scenario, out: &mut Emitter) -> Result<()> {
    let s = scenario
        .shape
        .as_ref()
        .ok_or_else(|| missing("shape", Command::Scan, "a mode shape"))?;
    let points = overlap_scan(&s.shape, s.waist, &scan_line(&s.shape, s.scan_y, s.scan_points))?;
    out.table("scan.csv", scan_csv(&points))
}

pub fn scan_csv(points: &[ScanPoint]) -> String {
    let mut text = String::from("x_m,y_m,relative_level,effective_mass_kg,edge_truncated\n");
    for p in points {
        let _ = writeln!(
            text,
            "{:e},{:e},{:e},{:e},{}",
            p.position.0, p.position.1, p.level, p.effective_mass, p.edge_truncated
        );
    }
    text
}

/// The model a synthesized record is drawn from.
fn synthesize(scenario: &Scenario, s: &SynthesisSettings) -> Result<TimeSeries> {
    match s.model {
        SynthesisModel::Thermal => {
            let (mode, env) = (&s.mode, &scenario.environment);
            synthesize_from_fn(|f| mode.thermal_psd_at(env, f), s.sample_rate, s.duration, scenario.seed)
        }
        SynthesisModel::Budget => {
            let nyquist = 0.5 * s.sample_rate;
            let grid = FrequencyGrid::logarithmic(1.0 / s.duration, nyquist, 2000)?;
            let resonances: Vec<(f64, f64)> = scenario
                .modes
                .iter()
                .filter(|m| m.resonance_frequency() < nyquist)
                .map(|m| (m.resonance_frequency(), m.linewidth()))
                .collect();
            let report = scenario_budget(scenario, &grid.points_with_resonances(&resonances))?;
            synthesize_timeseries(report.total(), s.sample_rate, s.duration, scenario.seed)
        }
    }
}

fn synthesis_settings(scenario: &Scenario, command: Command) -> Result<&SynthesisSettings> {
    scenario
        .synthesis
        .as_ref()
        .ok_or_else(|| missing("synthesis", command, "sample rate, duration and RBW of the record"))
}

fn synth(scenario: &Scenario, out: &mut Emitter) -> Result<()> {
    let s = synthesis_settings(scenario, Command::Synth)?;
    let series = synthesize(scenario, s)?;
    out.series("timeseries.bin", &series)?;
    if scenario.outputs.timeseries_csv {
        out.write("timeseries.csv", series.to_csv_string().as_bytes(), Kind::Text)?;
    }
    let est = welch(&series, s.rbw)?;
    out.spectrum("welch.csv", &est.spectrum)?;
    out.text("synth_summary.txt", synth_summary(&series, &est))
}

fn synth_summary(series: &TimeSeries, est: &WelchEstimate) -> String {
    format!(
        "samples={}\nsample_rate_hz={:e}\nseed={}\nmean_square_m2={:e}\nsegment_length={}\naverages={}\nrbw_hz={:e}\n",
        series.len(),
        series.sample_rate(),
        series.seed(),
        series.mean_square(),
        est.segment_length,
        est.averages,
        est.spectrum.rbw_hz().unwrap_or(f64::NAN),
    )
}

/// Fit result of the `fit` command with the temperature inferred from it.
#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub fit: LorentzianFit,
    pub temperature: f64,
    pub spectrum: NoiseSpectrum,
}

/// Fit the selected mode in either the configured spectrum file or a
/// freshly synthesized and Welch-estimated record.
pub fn scenario_fit(scenario: &Scenario) -> Result<FitReport> {
    let settings = scenario
        .fit
        .as_ref()
        .ok_or_else(|| missing("modes", Command::Fit, "a mode to fit"))?;
    let spectrum = match &settings.spectrum {
        Some(s) => s.clone(),
        None => {
            let s = synthesis_settings(scenario, Command::Fit)?;
            welch(&synthesize(scenario, s)?, s.rbw)?.spectrum
        }
    };
    let mode = &settings.mode;
    // a cooled spectrum is wider than the bare mode: size the window from
    // the data's half-power width when it exceeds the bare linewidth
    let width = observed_linewidth(&spectrum, mode.resonance_frequency()).max(mode.linewidth());
    let half = settings.half_width_linewidths * width;
    let f0 = mode.resonance_frequency();
    let opts = FitOptions {
        model: settings.model,
        ..FitOptions::default()
    };
    let fit = fit_lorentzian_with(&spectrum, (f0 - half, f0 + half), &scenario.environment, &opts)?;
    let temperature = equipartition_temperature(&spectrum, &fit, mode.effective_mass())?;
    Ok(FitReport {
        fit,
        temperature,
        spectrum,
    })
}

/// Full width at half maximum of the tallest point within 1 % of `f0`.
fn observed_linewidth(spectrum: &NoiseSpectrum, f0: f64) -> f64 {
    let (fs, vs) = (spectrum.frequencies(), spectrum.values());
    let Some(peak) = (0..fs.len())
        .filter(|&i| (fs[i] - f0).abs() <= 0.01 * f0)
        .max_by(|&a, &b| vs[a].total_cmp(&vs[b]))
    else {
        return 0.0;
    };
    let half = 0.5 * vs[peak];
    let lo = (0..peak).rev().find(|&i| vs[i] < half).map_or(fs[0], |i| fs[i]);
    let hi = (peak..fs.len()).find(|&i| vs[i] < half).map_or(fs[fs.len() - 1], |i| fs[i]);
    hi - lo
}

fn fit(scenario: &Scenario, out: &mut Emitter) -> Result<()> {
    let report = scenario_fit(scenario)?;
    let f = &report.fit;
    let mut summary = String::from(
        "f0_hz,linewidth_hz,q,peak_psd_m2_hz,background_m2_hz,m_eff_kg,t_eff_k,sigma_f0_hz,sigma_linewidth_hz,residual_norm,points\n",
    );
    let _ = writeln!(
        summary,
        "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{}",
        f.center_frequency,
        f.linewidth,
        f.quality_factor(),
        f.peak_psd,
        f.background_psd,
        f.effective_mass(),
        report.temperature,
        f.uncertainty.center_frequency,
        f.uncertainty.linewidth,
        f.residual_norm,
        f.points
    );
    out.table("fit_summary.csv", summary)?;
    let window = report.spectrum.window(f.window.0, f.window.1)?;
    out.spectrum("fit_data.csv", &window)?;
    let model = NoiseSpectrum::from_fn(window.frequencies().to_vec(), window.unit(), |x| f.evaluate(x))?;
    out.spectrum("fit_model.csv", &model)
}
