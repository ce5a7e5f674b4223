//! Integrate the Langevin equation of a Q = 1000 mode in the time domain
//! and compare its Welch spectrum with the analytic thermal PSD.
//!
//! cargo run --release --example langevin_cross_check

use optomech::dsp::{expected_welch_psd, integrate_thermal_oscillator, welch, LangevinSettings};
use optomech::mechanics::{Environment, MechanicalMode};

fn main() -> optomech::Result<()> {
    let mode = MechanicalMode::new("q1000", 814e3, 190e-9, 1e3)?;
    let env = Environment::room_temperature();
    let settings = LangevinSettings {
        output_rate: 4.0 * mode.resonance_frequency(),
        substeps: 100,
        duration: 4.0,
        seed: 3,
    };
    let series = integrate_thermal_oscillator(&mode, &env, &settings)?;
    let est = welch(&series, 400.0)?;
    let rbw = est.spectrum.rbw_hz().expect("welch attaches its RBW");
    println!("{} samples, {} averages, RBW {rbw:.1} Hz", series.len(), est.averages);

    let (f0, width) = (mode.resonance_frequency(), mode.linewidth());
    let window = est.spectrum.window(f0 - 10.0 * width, f0 + 10.0 * width)?;
    let expected = expected_welch_psd(|f| mode.thermal_psd_at(&env, f), rbw, window.frequencies())?;
    let ratios: Vec<(f64, f64)> = window
        .iter()
        .zip(expected.values())
        .map(|((f, got), want)| ((f - f0) / width, got / want))
        .collect();
    for k in (-10..=10).step_by(2) {
        let (x, r) = ratios
            .iter()
            .min_by(|a, b| (a.0 - k as f64).abs().total_cmp(&(b.0 - k as f64).abs()))
            .expect("window is not empty");
        println!("{x:+6.2} linewidths  ratio {r:.3}");
    }
    let worst = ratios.iter().map(|(_, r)| (r - 1.0).abs()).fold(0.0, f64::max);
    println!("largest deviation over +-10 linewidths: {:.1}%", 100.0 * worst);
    Ok(())
}
