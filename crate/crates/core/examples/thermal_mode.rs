//! Fluctuation-dissipation thermal noise of a single mechanical mode,
//! checked against equipartition.

use optomech::mechanics::{Environment, MechanicalMode};
use optomech::FrequencyGrid;

fn main() -> optomech::Result<()> {
    let mode = MechanicalMode::new("814kHz", 814e3, 190e-9, 1e4)?;
    let env = Environment::new(300.0)?;

    println!("linewidth      {:.1} Hz", mode.linewidth());
    println!("|chi(f_m)|     {:.4e} m/N", mode.susceptibility(814e3).norm());
    println!("force PSD      {:.4e} N^2/Hz", mode.thermal_force_psd(&env));
    println!("peak ASD       {:.4e} m/rtHz", mode.peak_thermal_asd(&env));
    println!("rms            {:.4e} m", mode.rms_displacement(&env));

    let grid = FrequencyGrid::logarithmic(1.0, 1e8, 2000)?;
    let freqs = grid.points_with_resonances(&[(mode.resonance_frequency(), mode.linewidth())]);
    let spectrum = mode.thermal_displacement_psd(&env, &freqs)?;
    let ratio = spectrum.total_variance() / mode.thermal_variance(&env);
    println!("integrated variance / kT/k = {ratio:.5}");

    println!("\noffset_linewidths  asd_m_rthz");
    for k in [-20.0, -5.0, -1.0, -0.5, 0.0, 0.5, 1.0, 5.0, 20.0] {
        let f = mode.resonance_frequency() + k * mode.linewidth();
        println!("{k:>17}  {:.3e}", mode.thermal_psd_at(&env, f).sqrt());
    }
    Ok(())
}
