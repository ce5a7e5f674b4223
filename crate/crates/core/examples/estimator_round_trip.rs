//! Synthesize a thermal record of the 814 kHz mode, estimate its spectrum at
//! 20 Hz RBW and recover the mode parameters with a Lorentzian fit.
//!
//! cargo run --release --example estimator_round_trip [seed]

use std::time::Instant;

use optomech::dsp::{equipartition_temperature, fit_lorentzian, synthesize_timeseries, welch};
use optomech::mechanics::{Environment, MechanicalMode};
use optomech::FrequencyGrid;

fn main() -> optomech::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let mode = MechanicalMode::reference();
    let env = Environment::room_temperature();
    let (fs, duration) = (2f64.powi(21), 32.0);

    let grid = FrequencyGrid::logarithmic(10.0, 1.2e6, 400)?;
    let freqs = grid.points_with_resonances(&[(mode.resonance_frequency(), mode.linewidth())]);
    let model = mode.thermal_displacement_psd(&env, &freqs)?;

    let t = Instant::now();
    let series = synthesize_timeseries(&model, fs, duration, seed)?;
    println!("synthesized {} samples in {:.1} s", series.len(), t.elapsed().as_secs_f64());

    let t = Instant::now();
    let est = welch(&series, 20.0)?;
    drop(series);
    println!(
        "welch: {} averages, RBW {:.3} Hz, {:.1} s",
        est.averages,
        est.spectrum.rbw_hz().unwrap_or(f64::NAN),
        t.elapsed().as_secs_f64()
    );

    let f0 = mode.resonance_frequency();
    let half = 15.0 * mode.linewidth();
    let fit = fit_lorentzian(&est.spectrum, (f0 - half, f0 + half), &env)?;
    let t_eff = equipartition_temperature(&est.spectrum, &fit, mode.effective_mass())?;
    println!("f0    {:.3} Hz  (true {:.3})", fit.center_frequency, f0);
    println!("Q     {:.1}  (true {:.1})", fit.quality_factor(), mode.quality_factor());
    println!("m_eff {:.4e} kg  (true {:.4e})", fit.effective_mass(), mode.effective_mass());
    println!("T_eff {:.2} K  (true {:.2})", t_eff, env.temperature());
    Ok(())
}
