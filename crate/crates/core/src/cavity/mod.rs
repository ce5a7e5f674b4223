//! Single-ended Fabry-Perot cavity read out in reflection by Pound-Drever-Hall
//! (PDH) detection.
//!
//! All cavity losses other than the input coupler (residual transmission of
//! the back mirror, absorption and scattering on both mirrors) are lumped in
//! one round-trip power loss. Mirror motion enters the readout as an
//! effective detuning: displacement frequencies are far below the PDH
//! sidebands.

mod bessel;

use num_complex::Complex64;

use crate::constants::{photon_flux, SPEED_OF_LIGHT};
use crate::spectrum::{NoiseSpectrum, SpectrumUnit};
use crate::{Error, Result};

pub use bessel::{j0, j1};

/// Upper bound on the modulation index: just below the first zero of J0.
pub const MAX_MODULATION_INDEX: f64 = 2.4;

#[derive(Debug, Clone, PartialEq)]
pub struct OpticalCavity {
    length: f64,
    input_transmission: f64,
    round_trip_loss: f64,
    wavelength: f64,
    waist: f64,
}

impl OpticalCavity {
    /// `input_transmission` and `round_trip_loss` are power fractions.
    pub fn new(
        length: f64,
        input_transmission: f64,
        round_trip_loss: f64,
        wavelength: f64,
        waist: f64,
    ) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::validation("length_m", format!("must be > 0, got {length}")));
        }
        if !(input_transmission > 0.0 && input_transmission < 1.0) {
            return Err(Error::validation(
                "input_transmission_T",
                format!("must lie in (0, 1), got {input_transmission}"),
            ));
        }
        if !(0.0..1.0).contains(&round_trip_loss) {
            return Err(Error::validation(
                "round_trip_loss_L",
                format!("must lie in [0, 1), got {round_trip_loss}"),
            ));
        }
        if input_transmission + round_trip_loss >= 1.0 {
            return Err(Error::validation(
                "round_trip_loss_L",
                "input_transmission_T + round_trip_loss_L must be < 1",
            ));
        }
        if !(wavelength > 0.0) {
            return Err(Error::validation("wavelength_m", format!("must be > 0, got {wavelength}")));
        }
        if !(waist > 0.0) {
            return Err(Error::validation("waist_m", format!("must be > 0, got {waist}")));
        }
        Ok(Self {
            length,
            input_transmission,
            round_trip_loss,
            wavelength,
            waist,
        })
    }

    /// The apparatus: 2.4 mm long, T = 70 ppm, L = 140 ppm, 1064 nm, 60 µm waist.
    pub fn reference() -> Self {
        Self::new(2.4e-3, 70e-6, 140e-6, 1.064e-6, 60e-6).expect("reference cavity is valid")
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn input_transmission(&self) -> f64 {
        self.input_transmission
    }

    pub fn round_trip_loss(&self) -> f64 {
        self.round_trip_loss
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn waist(&self) -> f64 {
        self.waist
    }

    /// Total round-trip power loss T + L.
    pub fn total_loss(&self) -> f64 {
        self.input_transmission + self.round_trip_loss
    }

    /// 2π / (T + L).
    pub fn finesse(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.total_loss()
    }

    /// c / (2·length).
    pub fn free_spectral_range(&self) -> f64 {
        SPEED_OF_LIGHT / (2.0 * self.length)
    }

    /// Half width at half maximum of the resonance, FSR / (2·finesse).
    pub fn bandwidth(&self) -> f64 {
        self.free_spectral_range() / (2.0 * self.finesse())
    }

    /// Amplitude reflection of the cavity at a laser detuning (Hz) from resonance.
    ///
    /// Airy formula with input amplitude reflectivity √(1−T) and round-trip
    /// amplitude attenuation √(1−L). The detuning must lie within the
    /// principal free spectral range.
    pub fn reflection_coefficient(&self, detuning: f64) -> Result<Complex64> {
        let fsr = self.free_spectral_range();
        if !(detuning.abs() < 0.5 * fsr) {
            return Err(Error::Domain(format!(
                "detuning {detuning} Hz outside the principal FSR (±{:.6e} Hz)",
                0.5 * fsr
            )));
        }
        let r_in = (1.0 - self.input_transmission).sqrt();
        let attenuation = (1.0 - self.round_trip_loss).sqrt();
        let phase = Complex64::from_polar(attenuation, 2.0 * std::f64::consts::PI * detuning / fsr);
        Ok((r_in - phase) / (1.0 - r_in * phase))
    }

    /// Laser frequency excursion equivalent to a cavity length change.
    ///
    /// At lock a fractional length change and a fractional laser-frequency
    /// change are indistinguishable: δL = length·δν/ν.
    pub fn frequency_modulation_calibration(&self, carrier_frequency: f64, delta_nu: f64) -> Result<f64> {
        if !(carrier_frequency > 0.0) {
            return Err(Error::Domain(format!(
                "carrier frequency must be positive, got {carrier_frequency}"
            )));
        }
        Ok(self.length * delta_nu / carrier_frequency)
    }

    /// Convert a laser frequency-noise PSD (Hz²/Hz) into equivalent displacement (m²/Hz).
    pub fn frequency_noise_to_displacement(
        &self,
        carrier_frequency: f64,
        frequency_noise: &NoiseSpectrum,
    ) -> Result<NoiseSpectrum> {
        frequency_noise.require_unit(SpectrumUnit::Frequency)?;
        if !(carrier_frequency > 0.0) {
            return Err(Error::Domain(format!(
                "carrier frequency must be positive, got {carrier_frequency}"
            )));
        }
        let factor = (self.length / carrier_frequency).powi(2);
        frequency_noise.scaled(factor, SpectrumUnit::Displacement)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaserSource {
    power: f64,
    wavelength: f64,
    modulation_index: f64,
    sideband_frequency: f64,
    frequency_noise: Option<NoiseSpectrum>,
}

impl LaserSource {
    pub fn new(power: f64, wavelength: f64, modulation_index: f64, sideband_frequency: f64) -> Result<Self> {
        if !(power >= 0.0) || !power.is_finite() {
            return Err(Error::validation("power_w", format!("must be >= 0, got {power}")));
        }
        if !(wavelength > 0.0) {
            return Err(Error::validation("wavelength_m", format!("must be > 0, got {wavelength}")));
        }
        if !(0.0..MAX_MODULATION_INDEX).contains(&modulation_index) {
            return Err(Error::validation(
                "modulation_index",
                format!("must lie in [0, {MAX_MODULATION_INDEX}), got {modulation_index}"),
            ));
        }
        if !(sideband_frequency > 0.0) {
            return Err(Error::validation(
                "sideband_frequency_hz",
                format!("must be > 0, got {sideband_frequency}"),
            ));
        }
        Ok(Self {
            power,
            wavelength,
            modulation_index,
            sideband_frequency,
            frequency_noise: None,
        })
    }

    /// Attach a frequency-noise envelope (Hz²/Hz).
    pub fn with_frequency_noise(mut self, envelope: NoiseSpectrum) -> Result<Self> {
        envelope.require_unit(SpectrumUnit::Frequency)?;
        self.frequency_noise = Some(envelope);
        Ok(self)
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn modulation_index(&self) -> f64 {
        self.modulation_index
    }

    pub fn sideband_frequency(&self) -> f64 {
        self.sideband_frequency
    }

    pub fn frequency_noise(&self) -> Option<&NoiseSpectrum> {
        self.frequency_noise.as_ref()
    }

    pub fn carrier_frequency(&self) -> f64 {
        SPEED_OF_LIGHT / self.wavelength
    }

    /// Incident photon flux, photons/s.
    pub fn photon_flux(&self) -> f64 {
        photon_flux(self.power, self.wavelength).expect("validated laser")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionChain {
    mode_matching: f64,
    detection_efficiency: f64,
}

impl DetectionChain {
    pub fn new(mode_matching: f64, detection_efficiency: f64) -> Result<Self> {
        if !(mode_matching > 0.0 && mode_matching <= 1.0) {
            return Err(Error::validation(
                "mode_matching_eta",
                format!("must lie in (0, 1], got {mode_matching}"),
            ));
        }
        if !(detection_efficiency > 0.0 && detection_efficiency <= 1.0) {
            return Err(Error::validation(
                "detection_efficiency_eta_ph",
                format!("must lie in (0, 1], got {detection_efficiency}"),
            ));
        }
        Ok(Self {
            mode_matching,
            detection_efficiency,
        })
    }

    pub fn mode_matching(&self) -> f64 {
        self.mode_matching
    }

    pub fn detection_efficiency(&self) -> f64 {
        self.detection_efficiency
    }
}

/// Shot-noise penalty of the PDH modulation, 1 / (J0(m)·J1(m)).
pub fn bessel_penalty(modulation_index: f64) -> Result<f64> {
    let m = modulation_index;
    if !(m > 0.0 && m < MAX_MODULATION_INDEX) {
        return Err(Error::Domain(format!(
            "modulation index must lie in (0, {MAX_MODULATION_INDEX}), got {m}"
        )));
    }
    let product = j0(m) * j1(m);
    if product.abs() < 1e-12 {
        return Err(Error::Domain(format!("modulation index {m} sits on a Bessel zero")));
    }
    Ok(1.0 / product)
}

/// Modulation index maximizing J0·J1 (minimum shot-noise penalty).
pub fn optimal_modulation_index() -> f64 {
    crate::numeric::golden_section_max(|m| j0(m) * j1(m), 0.1, 2.0, 1e-12)
}

/// Lower-branch modulation index giving a prescribed penalty F(m).
///
/// Returns a domain error if the target is below the minimum penalty.
pub fn modulation_index_for_penalty(target: f64) -> Result<f64> {
    let m_opt = optimal_modulation_index();
    let f_min = bessel_penalty(m_opt)?;
    if !(target >= f_min) {
        return Err(Error::Domain(format!(
            "penalty {target} below the minimum {f_min:.6} reached at m = {m_opt:.6}"
        )));
    }
    // F decreases monotonically on (0, m_opt]; regula falsi (Illinois) on F - target.
    let g = |m: f64| 1.0 / (j0(m) * j1(m)) - target;
    let (mut a, mut b) = (1e-9_f64, m_opt);
    let (mut ga, mut gb) = (g(a), g(b));
    let mut side = 0i8;
    for _ in 0..200 {
        let c = (a * gb - b * ga) / (gb - ga);
        let gc = g(c);
        if gc.abs() < 1e-13 * target || (b - a) < 1e-15 {
            return Ok(c);
        }
        if gc.signum() == ga.signum() {
            a = c;
            ga = gc;
            if side == -1 {
                gb *= 0.5;
            }
            side = -1;
        } else {
            b = c;
            gb = gc;
            if side == 1 {
                ga *= 0.5;
            }
            side = 1;
        }
    }
    Ok(0.5 * (a + b))
}

/// Demodulated PDH error signal at a laser detuning (Hz), normalized to the
/// incident power.
///
/// Resolved-sideband form: carrier and ±first sidebands beat in reflection;
/// the quadrature component of the beat is kept. Odd in detuning, zero on
/// resonance, positive slope through the lock point.
pub fn pdh_error_signal(cavity: &OpticalCavity, laser: &LaserSource, detuning: f64) -> Result<f64> {
    let m = laser.modulation_index();
    let (a0, a1) = (j0(m), j1(m));
    if (a0 * a1).abs() < 1e-12 {
        return Err(Error::Degenerate(format!(
            "modulation index {m} gives no carrier-sideband beat"
        )));
    }
    let omega = laser.sideband_frequency();
    let r0 = cavity.reflection_coefficient(detuning)?;
    let r_up = cavity.reflection_coefficient(detuning + omega)?;
    let r_down = cavity.reflection_coefficient(detuning - omega)?;
    let beat = r0.conj() * r_up - r0 * r_down.conj();
    Ok(2.0 * a0 * a1 * beat.im)
}

/// Slope of the PDH error signal at the lock point, per Hz of detuning.
///
/// Closed form of the derivative of [`pdh_error_signal`] at zero detuning.
pub fn pdh_slope(cavity: &OpticalCavity, laser: &LaserSource) -> Result<f64> {
    let m = laser.modulation_index();
    let (a0, a1) = (j0(m), j1(m));
    if (a0 * a1).abs() < 1e-12 {
        return Err(Error::Degenerate(format!(
            "modulation index {m} gives no carrier-sideband beat"
        )));
    }
    let omega = laser.sideband_frequency();
    let r0 = cavity.reflection_coefficient(0.0)?;
    let dr0 = reflection_derivative(cavity, 0.0);
    let r_up = cavity.reflection_coefficient(omega)?;
    let r_down = cavity.reflection_coefficient(-omega)?;
    let dr_up = reflection_derivative(cavity, omega);
    let dr_down = reflection_derivative(cavity, -omega);
    let d_beat = dr0.conj() * r_up + r0.conj() * dr_up - dr0 * r_down.conj() - r0 * dr_down.conj();
    Ok(2.0 * a0 * a1 * d_beat.im)
}

/// d r / d(detuning), analytic.
fn reflection_derivative(cavity: &OpticalCavity, detuning: f64) -> Complex64 {
    let fsr = cavity.free_spectral_range();
    let r_in = (1.0 - cavity.input_transmission).sqrt();
    let attenuation = (1.0 - cavity.round_trip_loss).sqrt();
    let k = 2.0 * std::f64::consts::PI / fsr;
    let p = Complex64::from_polar(attenuation, k * detuning);
    let dp = Complex64::i() * k * p;
    let den = 1.0 - r_in * p;
    // d/dp [(r - p)/(1 - r p)] = (r² - 1)/(1 - r p)²
    dp * (r_in * r_in - 1.0) / (den * den)
}

/// Shot-noise-limited displacement sensitivity (m/√Hz) at analysis frequency `f`:
///
/// δx = λ/(16·F·√I) · F(m)/√(η·η_ph) · (T+L)/T · √(1 + (f/Δν)²)
pub fn shot_noise_floor(
    cavity: &OpticalCavity,
    laser: &LaserSource,
    chain: &DetectionChain,
    f: f64,
) -> Result<f64> {
    let flux = laser.photon_flux();
    if !(flux > 0.0) {
        return Err(Error::Domain(
            "zero incident power: the shot-noise floor is unbounded".to_string(),
        ));
    }
    let penalty = bessel_penalty(laser.modulation_index())?;
    let t = cavity.input_transmission();
    let prefactor = laser.wavelength() / (16.0 * cavity.finesse() * flux.sqrt());
    let efficiency = (chain.mode_matching() * chain.detection_efficiency()).sqrt();
    let coupling = cavity.total_loss() / t;
    let rolloff = (1.0 + (f / cavity.bandwidth()).powi(2)).sqrt();
    Ok(prefactor * penalty / efficiency * coupling * rolloff)
}

/// Shot-noise floor as a displacement PSD on a grid.
pub fn shot_noise_spectrum(
    cavity: &OpticalCavity,
    laser: &LaserSource,
    chain: &DetectionChain,
    frequencies: &[f64],
) -> Result<NoiseSpectrum> {
    let values = frequencies
        .iter()
        .map(|&f| shot_noise_floor(cavity, laser, chain, f).map(|x| x * x))
        .collect::<Result<Vec<_>>>()?;
    NoiseSpectrum::new(frequencies.to_vec(), values, SpectrumUnit::Displacement)
}

/// Modulation index (lower branch) at which the shot-noise floor at `f`
/// equals `target_asd`, all other parameters fixed.
pub fn modulation_index_for_floor(
    cavity: &OpticalCavity,
    laser: &LaserSource,
    chain: &DetectionChain,
    f: f64,
    target_asd: f64,
) -> Result<f64> {
    let m = laser.modulation_index().max(0.5);
    let probe = LaserSource::new(laser.power(), laser.wavelength(), m, laser.sideband_frequency())?;
    let floor = shot_noise_floor(cavity, &probe, chain, f)?;
    let penalty = bessel_penalty(m)?;
    // floor is proportional to F(m)
    modulation_index_for_penalty(target_asd / floor * penalty)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_laser(m: f64) -> LaserSource {
        LaserSource::new(1.5e-3, 1.064e-6, m, 12e6).unwrap()
    }

    fn chain() -> DetectionChain {
        DetectionChain::new(0.91, 0.93).unwrap()
    }

    #[test]
    fn finesse_examples() {
        let c = OpticalCavity::reference();
        assert!((c.finesse() - 29_919.93).abs() < 0.01);
        let lossless = OpticalCavity::new(2.4e-3, 70e-6, 0.0, 1.064e-6, 60e-6).unwrap();
        assert!((lossless.finesse() / c.finesse() - 3.0).abs() < 1e-12);
        let sym = OpticalCavity::new(2.4e-3, 1e-4, 1e-4, 1.064e-6, 60e-6).unwrap();
        assert!((sym.finesse() - std::f64::consts::PI / 1e-4).abs() < 1e-9);
    }

    #[test]
    fn bandwidth_examples() {
        let c = OpticalCavity::reference();
        // finesse -> FSR -> HWHM chain by hand
        let fsr = 299_792_458.0 / (2.0 * 2.4e-3);
        let oracle = fsr / (2.0 * (2.0 * std::f64::consts::PI / 210e-6));
        assert!((c.bandwidth() / oracle - 1.0).abs() < 1e-14);
        assert!((c.bandwidth() / 1.0444e6 - 1.0).abs() < 1e-3);
        // at exactly finesse 30 000 (c rounded to 3e8 gives 1.0417 MHz)
        assert!((fsr / 60_000.0 / 1.0417e6 - 1.0).abs() < 1e-3);
        let long = OpticalCavity::new(4.8e-3, 70e-6, 140e-6, 1.064e-6, 60e-6).unwrap();
        assert!((c.bandwidth() / long.bandwidth() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn invariants_reject_bad_losses() {
        assert!(OpticalCavity::new(2.4e-3, 0.0, 1e-4, 1.064e-6, 6e-5).is_err());
        assert!(OpticalCavity::new(2.4e-3, 0.6, 0.5, 1.064e-6, 6e-5).is_err());
        assert!(OpticalCavity::new(0.0, 1e-4, 1e-4, 1.064e-6, 6e-5).is_err());
        match OpticalCavity::new(2.4e-3, 0.0, 1e-4, 1.064e-6, 6e-5) {
            Err(Error::Validation { key, .. }) => assert_eq!(key, "input_transmission_T"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reflection_on_and_off_resonance() {
        let c = OpticalCavity::reference();
        let r0 = c.reflection_coefficient(0.0).unwrap();
        // impedance-matching formula, undercoupled
        let (t, l) = (70e-6_f64, 140e-6_f64);
        let oracle = ((l - t) / (l + t)).powi(2);
        assert!((r0.norm_sqr() / oracle - 1.0).abs() < 1e-3);
        assert!((r0.norm_sqr() - 1.0 / 9.0).abs() < 1e-3);
        let far = c.reflection_coefficient(1e3 * c.bandwidth()).unwrap();
        assert!(far.norm_sqr() > 0.999);
        let d = c.bandwidth();
        let plus = c.reflection_coefficient(d).unwrap();
        let minus = c.reflection_coefficient(-d).unwrap();
        assert!((plus - minus.conj()).norm() < 1e-15);
        assert!(c.reflection_coefficient(c.free_spectral_range()).is_err());
    }

    #[test]
    fn reflection_is_passive_on_a_sweep() {
        let c = OpticalCavity::reference();
        let d = c.bandwidth();
        for i in -2000..=2000 {
            let r = c.reflection_coefficient(i as f64 * d / 100.0).unwrap();
            assert!(r.norm_sqr() <= 1.0 + 1e-15 && r.norm_sqr() >= 0.0);
        }
    }

    #[test]
    fn pdh_lock_point_and_symmetry() {
        let c = OpticalCavity::reference();
        let laser = reference_laser(0.66);
        assert!(pdh_error_signal(&c, &laser, 0.0).unwrap().abs() < 1e-15);
        let mut max = 0.0f64;
        let mut worst = 0.0f64;
        for i in 1..=400 {
            let d = i as f64 * c.bandwidth() / 40.0;
            let p = pdh_error_signal(&c, &laser, d).unwrap();
            let m = pdh_error_signal(&c, &laser, -d).unwrap();
            max = max.max(p.abs());
            worst = worst.max((p + m).abs());
        }
        assert!(worst < 1e-12 * max);
    }

    #[test]
    fn pdh_slope_matches_finite_difference() {
        let c = OpticalCavity::reference();
        let laser = reference_laser(0.66);
        let slope = pdh_slope(&c, &laser).unwrap();
        assert!(slope > 0.0 && slope.is_finite());
        let h = c.bandwidth() * 1e-4;
        let fd = (pdh_error_signal(&c, &laser, h).unwrap() - pdh_error_signal(&c, &laser, -h).unwrap())
            / (2.0 * h);
        assert!((fd / slope - 1.0).abs() < 1e-6);
    }

    #[test]
    fn pdh_degenerate_without_sidebands() {
        let c = OpticalCavity::reference();
        let laser = reference_laser(0.0);
        assert!(matches!(pdh_error_signal(&c, &laser, 1e3), Err(Error::Degenerate(_))));
    }

    #[test]
    fn bessel_penalty_limits() {
        assert!(bessel_penalty(1e-6).unwrap() > 1e5);
        assert!(bessel_penalty(0.0).is_err());
        assert!(bessel_penalty(2.4).is_err());
    }

    #[test]
    fn optimal_index_matches_derivative_root() {
        // oracle: bisection on d/dm (J0 J1) = -J1² + J0 (J0 - J1/m)
        let deriv = |m: f64| -j1(m).powi(2) + j0(m) * (j0(m) - j1(m) / m);
        let (mut a, mut b) = (0.5, 1.5);
        for _ in 0..200 {
            let c = 0.5 * (a + b);
            if deriv(a) * deriv(c) <= 0.0 {
                b = c;
            } else {
                a = c;
            }
        }
        let oracle = 0.5 * (a + b);
        let m = optimal_modulation_index();
        assert!((m - oracle).abs() < 1e-6);
        assert!((m - 1.08).abs() < 0.005);
        let f = bessel_penalty(m).unwrap();
        assert!((f - 2.95).abs() < 0.01, "minimum penalty {f}");
    }

    #[test]
    fn penalty_inversion_matches_bisection() {
        let target = 3.59;
        let m = modulation_index_for_penalty(target).unwrap();
        let (mut a, mut b) = (1e-3, 1.0);
        for _ in 0..200 {
            let c = 0.5 * (a + b);
            if bessel_penalty(c).unwrap() > target {
                a = c;
            } else {
                b = c;
            }
        }
        assert!((m - 0.5 * (a + b)).abs() < 1e-9);
        assert!((m - 0.657).abs() < 1e-3);
        assert!(modulation_index_for_penalty(2.0).is_err());
    }

    #[test]
    fn shot_floor_reproduces_reported_sensitivity() {
        let c = OpticalCavity::reference();
        let m = modulation_index_for_floor(&c, &reference_laser(0.5), &chain(), 1e6, 4e-19).unwrap();
        assert!((m - 0.6626).abs() < 1e-3, "back-solved m = {m}");
        let laser = reference_laser(m);
        let at_1mhz = shot_noise_floor(&c, &laser, &chain(), 1e6).unwrap();
        assert!((at_1mhz / 4e-19 - 1.0).abs() < 1e-9);
        let dc = shot_noise_floor(&c, &laser, &chain(), 0.0).unwrap();
        let ratio = (1.0 + (1e6 / c.bandwidth()).powi(2)).sqrt();
        assert!((at_1mhz / dc - ratio).abs() < 1e-12);
        assert!((ratio - 1.385).abs() < 0.005);
    }

    #[test]
    fn shot_floor_scaling() {
        let c = OpticalCavity::reference();
        let low = reference_laser(0.66);
        let high = LaserSource::new(6e-3, 1.064e-6, 0.66, 12e6).unwrap();
        let a = shot_noise_floor(&c, &low, &chain(), 5e5).unwrap();
        let b = shot_noise_floor(&c, &high, &chain(), 5e5).unwrap();
        assert!((a / b - 2.0).abs() < 1e-12);
        let mut prev = 0.0;
        for i in 0..100 {
            let x = shot_noise_floor(&c, &low, &chain(), i as f64 * 5e4).unwrap();
            assert!(x > prev);
            prev = x;
        }
        let dark = LaserSource::new(0.0, 1.064e-6, 0.66, 12e6).unwrap();
        assert!(shot_noise_floor(&c, &dark, &chain(), 1e6).is_err());
    }

    #[test]
    fn frequency_modulation_calibration_examples() {
        let c = OpticalCavity::reference();
        let carrier = 299_792_458.0 / 1.064e-6;
        let x = c.frequency_modulation_calibration(carrier, 1e3).unwrap();
        assert!((x - 2.4e-3 * 1e3 / carrier).abs() < 1e-30);
        assert!((x / 8.52e-15 - 1.0).abs() < 1e-3);
        assert_eq!(c.frequency_modulation_calibration(carrier, 0.0).unwrap(), 0.0);
        let long = OpticalCavity::new(4.8e-3, 70e-6, 140e-6, 1.064e-6, 60e-6).unwrap();
        let y = long.frequency_modulation_calibration(carrier, 1e3).unwrap();
        assert!((y / x - 2.0).abs() < 1e-12);
    }

    #[test]
    fn frequency_noise_conversion() {
        let c = OpticalCavity::reference();
        let carrier = 299_792_458.0 / 1.064e-6;
        let flat = NoiseSpectrum::flat(vec![1e3, 1e6], SpectrumUnit::Frequency, 1.0).unwrap();
        let x = c.frequency_noise_to_displacement(carrier, &flat).unwrap();
        assert_eq!(x.unit(), SpectrumUnit::Displacement);
        let oracle = (2.4e-3 / carrier).powi(2);
        assert!((x.values()[0] / oracle - 1.0).abs() < 1e-14);
        assert!((x.values()[0] / 7.26e-35 - 1.0).abs() < 1e-3);
        let zero = NoiseSpectrum::flat(vec![1e3], SpectrumUnit::Frequency, 0.0).unwrap();
        assert_eq!(c.frequency_noise_to_displacement(carrier, &zero).unwrap().values()[0], 0.0);
        let wrong = NoiseSpectrum::flat(vec![1e3], SpectrumUnit::Displacement, 1.0).unwrap();
        assert!(matches!(
            c.frequency_noise_to_displacement(carrier, &wrong),
            Err(Error::UnitMismatch { .. })
        ));
    }
}
