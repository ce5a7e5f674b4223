//! Mechanical modes of the micro-resonator.
//!
//! Each mode is a viscously damped harmonic oscillator driven by a white
//! Langevin force whose level follows from the fluctuation-dissipation
//! theorem. Spatial structure (mode shapes, optical-spot overlap) lives in
//! [`shape`]; mode tables and mode-shape grids load from CSV via [`table`].

pub mod shape;
pub mod table;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::constants::BOLTZMANN;
use crate::spectrum::{NoiseSpectrum, SpectrumUnit};
use crate::{Error, Result};

pub use shape::{
    clamped_beam_mode_shape, effective_mass_at_spot, overlap_scan, scan_line, ClampedBeamMode, ModeShape,
    OpticalSpot, ScanPoint, SpotCoupling,
};

/// Thermal bath.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Environment {
    temperature: f64,
}

impl Environment {
    pub fn new(temperature: f64) -> Result<Self> {
        if !(temperature > 0.0) || !temperature.is_finite() {
            return Err(Error::validation(
                "temperature_k",
                format!("must be > 0, got {temperature}"),
            ));
        }
        Ok(Self { temperature })
    }

    pub fn room_temperature() -> Self {
        Self { temperature: 300.0 }
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }
}

/// One vibration mode as seen by the optical readout.
#[derive(Debug, Clone, PartialEq)]
pub struct MechanicalMode {
    label: String,
    resonance_frequency: f64,
    effective_mass: f64,
    quality_factor: f64,
    /// Finite-element predictions `(frequency Hz, mass kg)`, kept for reference only.
    fem_prediction: Option<(f64, f64)>,
}

impl MechanicalMode {
    pub fn new(
        label: impl Into<String>,
        resonance_frequency: f64,
        effective_mass: f64,
        quality_factor: f64,
    ) -> Result<Self> {
        if !(resonance_frequency > 0.0) || !resonance_frequency.is_finite() {
            return Err(Error::validation(
                "f_m_hz",
                format!("must be > 0, got {resonance_frequency}"),
            ));
        }
        if !(effective_mass > 0.0) || !effective_mass.is_finite() {
            return Err(Error::validation(
                "m_eff_kg",
                format!("must be > 0, got {effective_mass}"),
            ));
        }
        if !(quality_factor > 0.0) || !quality_factor.is_finite() {
            return Err(Error::validation("q", format!("must be > 0, got {quality_factor}")));
        }
        Ok(Self {
            label: label.into(),
            resonance_frequency,
            effective_mass,
            quality_factor,
            fem_prediction: None,
        })
    }

    /// The 814 kHz mode: 190 µg, Q = 10⁴.
    pub fn reference() -> Self {
        Self::new("814kHz", 814e3, 190e-9, 1e4).expect("reference mode is valid")
    }

    pub fn with_fem_prediction(mut self, frequency: f64, mass: f64) -> Self {
        self.fem_prediction = Some((frequency, mass));
        self
    }

    /// Same mode with another effective mass (e.g. a different spot position).
    pub fn with_effective_mass(&self, effective_mass: f64) -> Result<Self> {
        let mut m = Self::new(
            self.label.clone(),
            self.resonance_frequency,
            effective_mass,
            self.quality_factor,
        )?;
        m.fem_prediction = self.fem_prediction;
        Ok(m)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn resonance_frequency(&self) -> f64 {
        self.resonance_frequency
    }

    pub fn effective_mass(&self) -> f64 {
        self.effective_mass
    }

    pub fn quality_factor(&self) -> f64 {
        self.quality_factor
    }

    pub fn fem_prediction(&self) -> Option<(f64, f64)> {
        self.fem_prediction
    }

    /// Ω_m = 2π·f_m.
    pub fn angular_frequency(&self) -> f64 {
        2.0 * PI * self.resonance_frequency
    }

    /// Energy damping rate γ = Ω_m / Q, rad/s.
    pub fn damping_rate(&self) -> f64 {
        self.angular_frequency() / self.quality_factor
    }

    /// Full width at half maximum of the displacement PSD, f_m / Q in Hz.
    pub fn linewidth(&self) -> f64 {
        self.resonance_frequency / self.quality_factor
    }

    /// Spring constant m_eff·Ω_m².
    pub fn stiffness(&self) -> f64 {
        self.effective_mass * self.angular_frequency().powi(2)
    }

    /// χ(Ω) = 1 / (m_eff·(Ω_m² − Ω² + iγΩ)), m/N.
    pub fn susceptibility(&self, f: f64) -> Complex64 {
        let w = 2.0 * PI * f;
        let wm = self.angular_frequency();
        let den = Complex64::new(wm * wm - w * w, self.damping_rate() * w) * self.effective_mass;
        den.inv()
    }

    /// One-sided Langevin force PSD 4·k_B·T·m_eff·γ, N²/Hz.
    pub fn thermal_force_psd(&self, env: &Environment) -> f64 {
        4.0 * BOLTZMANN * env.temperature() * self.effective_mass * self.damping_rate()
    }

    /// Thermal displacement PSD |χ(f)|²·S_F at a single frequency, m²/Hz.
    pub fn thermal_psd_at(&self, env: &Environment, f: f64) -> f64 {
        self.susceptibility(f).norm_sqr() * self.thermal_force_psd(env)
    }

    pub fn thermal_displacement_psd(&self, env: &Environment, frequencies: &[f64]) -> Result<NoiseSpectrum> {
        let s_f = self.thermal_force_psd(env);
        NoiseSpectrum::from_fn(frequencies.to_vec(), SpectrumUnit::Displacement, |f| {
            self.susceptibility(f).norm_sqr() * s_f
        })
    }

    /// Resonant ASD √(4·k_B·T·Q / (m_eff·Ω_m³)), m/√Hz.
    pub fn peak_thermal_asd(&self, env: &Environment) -> f64 {
        (4.0 * BOLTZMANN * env.temperature() * self.quality_factor
            / (self.effective_mass * self.angular_frequency().powi(3)))
        .sqrt()
    }

    /// Equipartition variance k_B·T / (m_eff·Ω_m²), m².
    pub fn thermal_variance(&self, env: &Environment) -> f64 {
        BOLTZMANN * env.temperature() / self.stiffness()
    }

    pub fn rms_displacement(&self, env: &Environment) -> f64 {
        self.thermal_variance(env).sqrt()
    }

    /// Displacement amplitude under a sinusoidal force of the given amplitude.
    pub fn driven_response(&self, force_amplitude: f64, f: f64) -> Result<f64> {
        if !(force_amplitude >= 0.0) {
            return Err(Error::Domain(format!(
                "force amplitude must be >= 0, got {force_amplitude}"
            )));
        }
        if !(f >= 0.0) {
            return Err(Error::Domain(format!("frequency must be >= 0, got {f}")));
        }
        Ok(self.susceptibility(f).norm() * force_amplitude)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mode() -> MechanicalMode {
        MechanicalMode::reference()
    }

    fn room() -> Environment {
        Environment::room_temperature()
    }

    #[test]
    fn susceptibility_limits() {
        let m = mode();
        let k = m.stiffness();
        let dc = m.susceptibility(0.0);
        assert!((dc.re * k - 1.0).abs() < 1e-14 && dc.im == 0.0);
        let res = m.susceptibility(m.resonance_frequency()).norm();
        assert!((res * k / m.quality_factor() - 1.0).abs() < 1e-9);
        // direct complex arithmetic for 814 kHz, 190 µg, Q = 1e4
        let wm = 2.0 * PI * 814e3;
        let oracle = 1.0 / (190e-9 * (wm / 1e4) * wm);
        assert!((res / oracle - 1.0).abs() < 1e-9);
        assert!((res / 2.012e-3 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn susceptibility_is_passive() {
        let m = mode();
        for i in 1..10_000 {
            let f = i as f64 * 200.0;
            assert!(m.susceptibility(f).im <= 0.0);
        }
    }

    #[test]
    fn thermal_force_examples() {
        let m = mode();
        let oracle = 4.0 * 1.380_649e-23 * 300.0 * 1.9e-7 * 2.0 * PI * 8.14e5 / 1e4;
        let s_f = m.thermal_force_psd(&room());
        assert!((s_f / oracle - 1.0).abs() < 1e-12);
        assert!((s_f / 1.61e-24 - 1.0).abs() < 5e-3);
        let cold = Environment::new(1e-30).unwrap();
        assert!(m.thermal_force_psd(&cold) < 1e-50);
        let stiff = MechanicalMode::new("q2", 814e3, 190e-9, 2e4).unwrap();
        assert!((m.thermal_force_psd(&room()) / stiff.thermal_force_psd(&room()) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn peak_asd_closed_form() {
        let m = mode();
        let env = room();
        let peak = m.peak_thermal_asd(&env);
        let via_chi = m.susceptibility(m.resonance_frequency()).norm() * m.thermal_force_psd(&env).sqrt();
        assert!((peak / via_chi - 1.0).abs() < 1e-12);
        assert!((peak / 2.55e-15 - 1.0).abs() < 5e-3);
    }

    #[test]
    fn high_frequency_rolloff() {
        let m = mode();
        let env = room();
        let a = m.thermal_psd_at(&env, 100e6);
        let b = m.thermal_psd_at(&env, 200e6);
        assert!((a / b / 16.0 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn rms_examples() {
        let m = mode();
        let x300 = m.rms_displacement(&room());
        assert!((x300 / 2.887e-14 - 1.0).abs() < 1e-3);
        let x5 = m.rms_displacement(&Environment::new(5.0).unwrap());
        assert!((x300 / x5 - 60f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn driven_response_examples() {
        let m = mode();
        let peak = m.driven_response(1e-9, m.resonance_frequency()).unwrap();
        assert!((peak / 2.0e-12 - 1.0).abs() < 0.01);
        assert_eq!(m.driven_response(0.0, 814e3).unwrap(), 0.0);
        // half-power points of |χ|² sit at f_m ± f_m/(2Q)
        let half = m.linewidth() / 2.0;
        for f in [m.resonance_frequency() - half, m.resonance_frequency() + half] {
            let r = m.driven_response(1e-9, f).unwrap();
            let db = 20.0 * (r / peak).log10();
            assert!((db + 3.0103).abs() < 0.01, "{db}");
        }
        assert!(m.driven_response(-1.0, 1.0).is_err());
    }

    #[test]
    fn rejects_non_physical_modes() {
        assert!(MechanicalMode::new("x", 0.0, 1e-9, 1e3).is_err());
        assert!(MechanicalMode::new("x", 1e6, -1e-9, 1e3).is_err());
        assert!(MechanicalMode::new("x", 1e6, 1e-9, 0.0).is_err());
        assert!(Environment::new(0.0).is_err());
    }
}
