//! CODATA 2018 exact values (SI 2019 redefinition).

/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Planck constant, J·s.
pub const PLANCK: f64 = 6.626_070_15e-34;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Optical frequency of a vacuum wavelength, Hz.
pub fn optical_frequency(wavelength: f64) -> f64 {
    SPEED_OF_LIGHT / wavelength
}

/// Photon flux (photons/s) carried by an optical power at a given wavelength.
pub fn photon_flux(power: f64, wavelength: f64) -> crate::Result<f64> {
    if !(wavelength > 0.0) {
        return Err(crate::Error::Domain(format!(
            "wavelength must be positive, got {wavelength}"
        )));
    }
    if !(power >= 0.0) {
        return Err(crate::Error::Domain(format!(
            "optical power must be non-negative, got {power}"
        )));
    }
    Ok(power * wavelength / (PLANCK * SPEED_OF_LIGHT))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn photon_flux_of_the_probe_beam() {
        // 1.5 mW at 1064 nm
        let flux = photon_flux(1.5e-3, 1.064e-6).unwrap();
        let oracle = 1.5e-3 / (6.626_070_15e-34 * 299_792_458.0 / 1.064e-6);
        assert!((flux / oracle - 1.0).abs() < 1e-14);
        assert!((flux / 8.03e15 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn photon_flux_zero_and_linear() {
        assert_eq!(photon_flux(0.0, 1.064e-6).unwrap(), 0.0);
        let one = photon_flux(1e-3, 1.064e-6).unwrap();
        let two = photon_flux(2e-3, 1.064e-6).unwrap();
        assert!((two / one - 2.0).abs() < 1e-15);
    }

    #[test]
    fn photon_flux_rejects_bad_wavelength() {
        assert!(photon_flux(1e-3, 0.0).is_err());
        assert!(photon_flux(1e-3, -1.0).is_err());
    }
}
