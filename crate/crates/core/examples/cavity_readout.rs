//! Cavity parameters, the PDH error signal around resonance and the
//! shot-noise-limited sensitivity of the reference apparatus.

use optomech::cavity::{
    bessel_penalty, modulation_index_for_floor, optimal_modulation_index, pdh_error_signal, pdh_slope,
    shot_noise_floor, DetectionChain, LaserSource, OpticalCavity,
};

fn main() -> optomech::Result<()> {
    let cavity = OpticalCavity::new(2.4e-3, 70e-6, 140e-6, 1.064e-6, 60e-6)?;
    let chain = DetectionChain::new(0.91, 0.93)?;
    let laser = LaserSource::new(1.5e-3, 1.064e-6, 0.6626, 12e6)?;

    println!("finesse        {:.1}", cavity.finesse());
    println!("FSR            {:.4e} Hz", cavity.free_spectral_range());
    println!("bandwidth      {:.4} MHz (HWHM)", cavity.bandwidth() / 1e6);
    println!("|r(0)|^2       {:.4}", cavity.reflection_coefficient(0.0)?.norm_sqr());

    println!("\ndetuning_hz  error_signal");
    let bw = cavity.bandwidth();
    for k in -4..=4 {
        let d = 0.5 * bw * k as f64;
        println!("{d:>11.3e}  {:+.4e}", pdh_error_signal(&cavity, &laser, d)?);
    }
    println!("slope at lock  {:.4e} /Hz", pdh_slope(&cavity, &laser)?);

    let m_opt = optimal_modulation_index();
    println!("\nmodulation index {:.4}: penalty {:.3}", laser.modulation_index(), bessel_penalty(laser.modulation_index())?);
    println!("optimum index    {m_opt:.4}: penalty {:.3}", bessel_penalty(m_opt)?);
    let m = modulation_index_for_floor(&cavity, &laser, &chain, 1e6, 4e-19)?;
    println!("index giving 4e-19 m/rtHz at 1 MHz: {m:.4}");

    println!("\nf_hz      floor_m_rthz");
    for f in [1e4, 1e5, 1e6, 3e6, 1e7] {
        println!("{f:<9.0e} {:.3e}", shot_noise_floor(&cavity, &laser, &chain, f)?);
    }
    Ok(())
}
