//! Direct time-domain integration of a thermally driven oscillator.
//!
//! m·ẍ + m·γ·ẋ + m·Ω_m²·x = F(t), with F white of one-sided PSD S_F. This is
//! deliberately independent of the frequency-domain machinery: its Welch
//! spectrum is compared with the analytic |χ|²·S_F as a cross-check.
//!
//! Semi-implicit (symplectic) Euler-Maruyama: the force kick over a step dt
//! has variance (S_F/2)/dt, the two-sided level divided by dt. The
//! integrator shifts the resonance by a relative (Ω_m·dt)²/24, which is why
//! the step is kept far below the period.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::TimeSeries;
use crate::mechanics::{Environment, MechanicalMode};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LangevinSettings {
    /// Rate of the stored record, Hz.
    pub output_rate: f64,
    /// Integration steps per stored sample.
    pub substeps: usize,
    pub duration: f64,
    pub seed: u64,
}

impl LangevinSettings {
    pub fn step(&self) -> f64 {
        1.0 / (self.output_rate * self.substeps as f64)
    }
}

/// Integrate from a draw of the stationary distribution and store every
/// `substeps`-th position.
///
/// The step must not exceed 1/(100·f_m).
pub fn integrate_thermal_oscillator(
    mode: &MechanicalMode,
    env: &Environment,
    settings: &LangevinSettings,
) -> Result<TimeSeries> {
    if settings.substeps == 0 || !(settings.output_rate > 0.0) || !(settings.duration > 0.0) {
        return Err(Error::Domain(
            "output rate, substeps and duration must all be positive".to_string(),
        ));
    }
    let dt = settings.step();
    if dt > 1.0 / (100.0 * mode.resonance_frequency()) {
        return Err(Error::Domain(format!(
            "integration step {dt:.3e} s exceeds 1/(100·f_m) = {:.3e} s",
            1.0 / (100.0 * mode.resonance_frequency())
        )));
    }
    let n_out = (settings.duration * settings.output_rate).round() as usize;
    if n_out == 0 {
        return Err(Error::Domain("record would be empty".to_string()));
    }
    let m = mode.effective_mass();
    let w2 = mode.angular_frequency().powi(2);
    let gamma = mode.damping_rate();
    let kick = (mode.thermal_force_psd(env) / (2.0 * dt)).sqrt() / m * dt;

    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
    let mut x = mode.rms_displacement(env) * normal();
    let mut v = (crate::constants::BOLTZMANN * env.temperature() / m).sqrt() * normal();
    let mut samples = Vec::with_capacity(n_out);
    for _ in 0..n_out {
        for _ in 0..settings.substeps {
            v += -(gamma * v + w2 * x) * dt + kick * normal();
            x += v * dt;
        }
        samples.push(x);
    }
    TimeSeries::new(settings.output_rate, samples, settings.seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stationary_variance() {
        // a slow, broad mode so a short run averages many correlation times
        let mode = MechanicalMode::new("slow", 1000.0, 1e-6, 10.0).unwrap();
        let env = Environment::room_temperature();
        let settings = LangevinSettings {
            output_rate: 20_000.0,
            substeps: 20,
            duration: 20.0,
            seed: 9,
        };
        let ts = integrate_thermal_oscillator(&mode, &env, &settings).unwrap();
        let ratio = ts.mean_square() / mode.thermal_variance(&env);
        // correlation time Q/(π f_m) ≈ 3 ms: ~6000 independent samples
        assert!((ratio - 1.0).abs() < 0.06, "{ratio}");
    }

    #[test]
    fn rejects_coarse_steps() {
        let mode = MechanicalMode::reference();
        let env = Environment::room_temperature();
        let settings = LangevinSettings {
            output_rate: 2e6,
            substeps: 10,
            duration: 1e-3,
            seed: 0,
        };
        assert!(integrate_thermal_oscillator(&mode, &env, &settings).is_err());
    }
}
