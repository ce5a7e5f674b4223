//! Cold damping: a viscous feedback force derived from the measured position.
//!
//! The loop applies F_fb = −iΩ·g·γ·m_eff·(x + x_n), a pure derivative of the
//! noisy measurement, with x_n white of PSD S_imp. Closing the loop gives
//!
//! S_x(Ω)  = [S_F/m² + g²γ²Ω²·S_imp] / [(Ω_m² − Ω²)² + (1+g)²γ²Ω²]
//! S_in(Ω) = [S_F/m² + |Ω_m² − Ω² + iγΩ|²·S_imp] / [(Ω_m² − Ω²)² + (1+g)²γ²Ω²]
//!
//! for the true motion and the in-loop record. With S_imp = 0 the mode
//! thermalizes at T/(1+g); with S_imp > 0 the re-injected imprecision sets
//! an optimum gain.

use std::f64::consts::PI;

use crate::constants::BOLTZMANN;
use crate::mechanics::{Environment, MechanicalMode};
use crate::numeric::golden_section_min;
use crate::spectrum::{FrequencyGrid, NoiseSpectrum, SpectrumUnit};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeedbackController {
    gain: f64,
    imprecision_psd: f64,
    enabled: bool,
}

impl FeedbackController {
    pub fn new(gain: f64, imprecision_psd: f64) -> Result<Self> {
        if !(gain >= 0.0) || !gain.is_finite() {
            return Err(Error::validation("gain_g", format!("must be finite and >= 0, got {gain}")));
        }
        if !(imprecision_psd >= 0.0) || !imprecision_psd.is_finite() {
            return Err(Error::validation(
                "imprecision_psd_m2_hz",
                format!("must be finite and >= 0, got {imprecision_psd}"),
            ));
        }
        Ok(Self {
            gain,
            imprecision_psd,
            enabled: true,
        })
    }

    /// A noiseless loop.
    pub fn ideal(gain: f64) -> Result<Self> {
        Self::new(gain, 0.0)
    }

    pub fn disabled(mut self) -> Self {
        self.enabled = false;
        self
    }

    pub fn with_gain(&self, gain: f64) -> Result<Self> {
        let mut c = Self::new(gain, self.imprecision_psd)?;
        c.enabled = self.enabled;
        Ok(c)
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    /// The gain actually applied: zero while the loop is open.
    pub fn effective_gain(&self) -> f64 {
        if self.enabled {
            self.gain
        } else {
            0.0
        }
    }

    pub fn imprecision_psd(&self) -> f64 {
        self.imprecision_psd
    }

    pub fn is_enabled(&self) -> bool {
        self.enabled
    }
}

/// Closed-loop (true motion, in-loop) PSDs at one frequency.
fn closed_loop_at(mode: &MechanicalMode, s_f: f64, g: f64, s_imp: f64, f: f64) -> (f64, f64) {
    let w = 2.0 * PI * f;
    let wm2 = mode.angular_frequency().powi(2);
    let gamma = mode.damping_rate();
    let m = mode.effective_mass();
    let detune = wm2 - w * w;
    let den = detune * detune + ((1.0 + g) * gamma * w).powi(2);
    let force = s_f / (m * m);
    let true_motion = (force + (g * gamma * w).powi(2) * s_imp) / den;
    let open = detune * detune + (gamma * w).powi(2);
    let in_loop = (force + open * s_imp) / den;
    (true_motion, in_loop)
}

/// True-motion and in-loop displacement PSDs on `frequencies`.
pub fn closed_loop_psd(
    mode: &MechanicalMode,
    env: &Environment,
    controller: &FeedbackController,
    frequencies: &[f64],
) -> Result<(NoiseSpectrum, NoiseSpectrum)> {
    let s_f = mode.thermal_force_psd(env);
    let (g, s_imp) = (controller.effective_gain(), controller.imprecision_psd());
    let (a, b): (Vec<f64>, Vec<f64>) = frequencies
        .iter()
        .map(|&f| closed_loop_at(mode, s_f, g, s_imp, f))
        .unzip();
    Ok((
        NoiseSpectrum::new(frequencies.to_vec(), a, SpectrumUnit::Displacement)?,
        NoiseSpectrum::new(frequencies.to_vec(), b, SpectrumUnit::Displacement)?,
    ))
}

/// Effective linewidth (1+g)·f_m/Q, Hz.
pub fn effective_linewidth(mode: &MechanicalMode, controller: &FeedbackController) -> f64 {
    (1.0 + controller.effective_gain()) * mode.linewidth()
}

/// Closed-form T_eff = T/(1+g) + m·Ω_m²·g²·γ·S_imp / (4·k_B·(1+g)).
pub fn effective_temperature_analytic(mode: &MechanicalMode, env: &Environment, controller: &FeedbackController) -> f64 {
    let g = controller.effective_gain();
    let heating = mode.effective_mass() * mode.angular_frequency().powi(2) * g * g * mode.damping_rate()
        * controller.imprecision_psd()
        / (4.0 * BOLTZMANN * (1.0 + g));
    env.temperature() / (1.0 + g) + heating
}

/// A temperature read off a finite spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct TemperatureEstimate {
    pub temperature: f64,
    /// Estimated contribution of the spectrum beyond the grid, K.
    pub truncation_error: f64,
    /// Set when the span is too short for the requested accuracy.
    pub warning: Option<String>,
}

/// Relative truncation above which a warning is attached.
pub const TRUNCATION_TOLERANCE: f64 = 5e-3;

/// T_eff = m_eff·Ω_m²·∫S_x df / k_B over the span of `spectrum`.
///
/// The missing tails are estimated by holding the first value down to DC
/// and extending the last two points as a power law.
pub fn spectral_temperature(mode: &MechanicalMode, spectrum: &NoiseSpectrum) -> Result<TemperatureEstimate> {
    spectrum.require_unit(SpectrumUnit::Displacement)?;
    if spectrum.len() < 2 {
        return Err(Error::Domain("need at least two spectrum points".to_string()));
    }
    let stiffness = mode.stiffness();
    let temperature = stiffness * spectrum.total_variance() / BOLTZMANN;
    let (f, v) = (spectrum.frequencies(), spectrum.values());
    let n = f.len();
    let low = v[0] * f[0];
    let high = if v[n - 1] > 0.0 && v[n - 2] > 0.0 && f[n - 2] > 0.0 {
        let slope = (v[n - 1] / v[n - 2]).ln() / (f[n - 1] / f[n - 2]).ln();
        if slope < -1.0 {
            v[n - 1] * f[n - 1] / (-slope - 1.0)
        } else {
            f64::INFINITY
        }
    } else {
        0.0
    };
    let truncation_error = stiffness * (low + high) / BOLTZMANN;
    let f_m = mode.resonance_frequency();
    let warning = if f[0] > f_m / 100.0 || f[n - 1] < 100.0 * f_m {
        Some(format!(
            "spectrum spans [{:.3e}, {:.3e}] Hz, narrower than [f_m/100, 100·f_m]; estimated truncation {truncation_error:.3e} K",
            f[0],
            f[n - 1]
        ))
    } else if !(truncation_error <= TRUNCATION_TOLERANCE * temperature) {
        Some(format!("estimated truncation error {truncation_error:.3e} K"))
    } else {
        None
    };
    if let Some(w) = &warning {
        log::warn!("{w}");
    }
    Ok(TemperatureEstimate {
        temperature,
        truncation_error,
        warning,
    })
}

/// A grid that resolves the closed-loop resonance and reaches far enough
/// into both tails for equipartition integrals.
pub fn integration_grid(mode: &MechanicalMode, controller: &FeedbackController) -> Result<Vec<f64>> {
    let f_m = mode.resonance_frequency();
    let width = effective_linewidth(mode, controller);
    let grid = FrequencyGrid::logarithmic(f_m * 1e-4, 1e4 * f_m.max(width), 3000)?;
    Ok(grid.points_with_resonances(&[(f_m, width)]))
}

/// T_eff by numeric integration of the true-motion spectrum.
pub fn effective_temperature(
    mode: &MechanicalMode,
    env: &Environment,
    controller: &FeedbackController,
) -> Result<TemperatureEstimate> {
    let grid = integration_grid(mode, controller)?;
    let (true_motion, _) = closed_loop_psd(mode, env, controller, &grid)?;
    spectral_temperature(mode, &true_motion)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoolingResult {
    pub gain: f64,
    pub effective_temperature: f64,
    /// (1+g)·f_m/Q, Hz.
    pub effective_linewidth: f64,
    /// ∫S_x df over the integration grid, m².
    pub area: f64,
    pub true_motion: NoiseSpectrum,
    pub in_loop: NoiseSpectrum,
}

/// One [`CoolingResult`] per gain; spectra are evaluated on `grid` refined
/// around the closed-loop resonance, temperatures on a dedicated wide grid.
pub fn gain_sweep(
    mode: &MechanicalMode,
    env: &Environment,
    template: &FeedbackController,
    gains: &[f64],
    grid: &FrequencyGrid,
) -> Result<Vec<CoolingResult>> {
    if gains.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::Domain("feedback gains must be sorted ascending".to_string()));
    }
    gains
        .iter()
        .map(|&g| {
            let controller = template.with_gain(g)?;
            let t = effective_temperature(mode, env, &controller)?;
            let width = effective_linewidth(mode, &controller);
            let points = grid.points_with_resonances(&[(mode.resonance_frequency(), width)]);
            let (true_motion, in_loop) = closed_loop_psd(mode, env, &controller, &points)?;
            Ok(CoolingResult {
                gain: g,
                effective_temperature: t.temperature,
                effective_linewidth: width,
                area: t.temperature * BOLTZMANN / mode.stiffness(),
                true_motion,
                in_loop,
            })
        })
        .collect()
}

/// Gain minimizing the numerically integrated T_eff over [0, g_max].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalGain {
    pub gain: f64,
    pub temperature: f64,
}

/// Golden-section search on ln(1+g).
pub fn optimal_gain(
    mode: &MechanicalMode,
    env: &Environment,
    imprecision_psd: f64,
    g_max: f64,
) -> Result<OptimalGain> {
    if !(g_max > 0.0) {
        return Err(Error::Domain(format!("g_max must be > 0, got {g_max}")));
    }
    let t_of = |g: f64| -> Result<f64> {
        let c = FeedbackController::new(g, imprecision_psd)?;
        Ok(effective_temperature(mode, env, &c)?.temperature)
    };
    // the objective is smooth and finite for every g >= 0
    let objective = |u: f64| t_of(u.exp_m1()).unwrap_or(f64::INFINITY);
    let u = golden_section_min(objective, 0.0, g_max.ln_1p(), 1e-7);
    let gain = u.exp_m1();
    Ok(OptimalGain {
        gain,
        temperature: t_of(gain)?,
    })
}

/// The closed-form optimum √(1 + T/C) − 1, C the imprecision-heating scale.
pub fn optimal_gain_analytic(mode: &MechanicalMode, env: &Environment, imprecision_psd: f64) -> f64 {
    let c = mode.effective_mass() * mode.angular_frequency().powi(2) * mode.damping_rate() * imprecision_psd
        / (4.0 * BOLTZMANN);
    if c > 0.0 {
        (1.0 + env.temperature() / c).sqrt() - 1.0
    } else {
        f64::INFINITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::{fit_lorentzian_with, FitModel, FitOptions};

    fn mode() -> MechanicalMode {
        MechanicalMode::reference()
    }

    fn room() -> Environment {
        Environment::room_temperature()
    }

    #[test]
    fn open_loop_limits() {
        let m = mode();
        let s_imp = 1e-38;
        let c = FeedbackController::new(0.0, s_imp).unwrap();
        let f = [1e5, 814e3, 2e6];
        let (x, y) = closed_loop_psd(&m, &room(), &c, &f).unwrap();
        for (i, &fi) in f.iter().enumerate() {
            let th = m.thermal_psd_at(&room(), fi);
            assert!((x.values()[i] / th - 1.0).abs() < 1e-12);
            assert!((y.values()[i] / (th + s_imp) - 1.0).abs() < 1e-12);
        }
        let off = FeedbackController::new(59.0, s_imp).unwrap().disabled();
        assert_eq!(closed_loop_psd(&m, &room(), &off, &f).unwrap().0, x);
    }

    #[test]
    fn ideal_cooling_by_sixty() {
        let m = mode();
        let c = FeedbackController::ideal(59.0).unwrap();
        let t = effective_temperature(&m, &room(), &c).unwrap();
        assert!((t.temperature / 5.0 - 1.0).abs() < 0.01, "{}", t.temperature);
        assert!(t.warning.is_none());
        let (x, _) = closed_loop_psd(&m, &room(), &c, &[814e3]).unwrap();
        let peak_ratio = m.thermal_psd_at(&room(), 814e3) / x.values()[0];
        assert!((peak_ratio / 3600.0 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn closed_loop_linewidth_is_fitted() {
        let m = mode();
        let c = FeedbackController::ideal(59.0).unwrap();
        let width = effective_linewidth(&m, &c);
        let grid = FrequencyGrid::linear(814e3 - 10.0 * width, 814e3 + 10.0 * width, 2001).unwrap();
        let (x, _) = closed_loop_psd(&m, &room(), &c, &grid.points()).unwrap();
        let opts = FitOptions {
            model: FitModel::ExactSusceptibility,
            ..FitOptions::default()
        };
        let fit = fit_lorentzian_with(&x, (grid.f_min(), grid.f_max()), &room(), &opts).unwrap();
        assert!((fit.linewidth / (60.0 * m.linewidth()) - 1.0).abs() < 0.01);
    }

    #[test]
    fn numeric_matches_closed_form() {
        let m = mode();
        for g in [0.0, 1.0, 10.0, 59.0, 100.0] {
            let c = FeedbackController::ideal(g).unwrap();
            let t = effective_temperature(&m, &room(), &c).unwrap().temperature;
            assert!((t * (1.0 + g) / 300.0 - 1.0).abs() < 0.01, "g={g}: {t}");
        }
        // adaptive quadrature oracle for the noisy loop at g = 59
        let c = FeedbackController::new(59.0, 1e-38).unwrap();
        let numeric = effective_temperature(&m, &room(), &c).unwrap().temperature;
        let analytic = effective_temperature_analytic(&m, &room(), &c);
        assert!((numeric / analytic - 1.0).abs() < 1e-3, "{numeric} vs {analytic}");
        assert!(numeric > 300.0 / 60.0);
    }

    #[test]
    fn noise_squashing() {
        let m = mode();
        let s_imp = 1.6e-37;
        let c = FeedbackController::new(1e4, s_imp).unwrap();
        let (_, y) = closed_loop_psd(&m, &room(), &c, &[814e3]).unwrap();
        assert!(y.values()[0] < s_imp);
    }

    #[test]
    fn sweep_follows_equipartition() {
        let m = mode();
        let gains = [0.0, 1.0, 3.0, 9.0, 59.0];
        let grid = FrequencyGrid::logarithmic(1e4, 1e7, 500).unwrap();
        let tmpl = FeedbackController::ideal(0.0).unwrap();
        let results = gain_sweep(&m, &room(), &tmpl, &gains, &grid).unwrap();
        for (r, expected) in results.iter().zip([300.0, 150.0, 75.0, 30.0, 5.0]) {
            assert!((r.effective_temperature / expected - 1.0).abs() < 0.01);
            assert!((r.effective_linewidth / ((1.0 + r.gain) * 81.4) - 1.0).abs() < 1e-12);
        }
        assert!(results.windows(2).all(|w| w[1].effective_temperature < w[0].effective_temperature));
        let ratio = results[1].area / results[4].area;
        assert!((ratio / 30.0 - 1.0).abs() < 0.01);
        assert!(gain_sweep(&m, &room(), &tmpl, &[], &grid).unwrap().is_empty());
        assert!(gain_sweep(&m, &room(), &tmpl, &[3.0, 1.0], &grid).is_err());
    }

    #[test]
    fn optimum_with_imprecision() {
        let m = mode();
        let s_imp = (4e-19f64).powi(2);
        let best = optimal_gain(&m, &room(), s_imp, 1e6).unwrap();
        let analytic = optimal_gain_analytic(&m, &room(), s_imp);
        assert!((best.gain / analytic - 1.0).abs() < 0.01, "{} vs {analytic}", best.gain);
        let at = |g: f64| {
            effective_temperature(&m, &room(), &FeedbackController::new(g, s_imp).unwrap())
                .unwrap()
                .temperature
        };
        assert!(at(0.1 * best.gain) > best.temperature);
        assert!(at(10.0 * best.gain) > best.temperature);
    }

    #[test]
    fn short_span_warns() {
        let m = mode();
        let (x, _) = closed_loop_psd(&m, &room(), &FeedbackController::ideal(0.0).unwrap(), &[8e5, 8.14e5, 8.3e5]).unwrap();
        assert!(spectral_temperature(&m, &x).unwrap().warning.is_some());
        assert!(FeedbackController::new(-1.0, 0.0).is_err());
    }
}
