//! Statistical checks of synthesis, Welch estimation and fitting on the
//! 814 kHz mode. Records are 8 s long (212 averages at 20 Hz RBW).

use optomech::dsp::{
    equipartition_temperature, expected_welch_psd, fit_lorentzian, synthesize_from_fn, welch, WelchEstimate,
};
use optomech::feedback::{closed_loop_psd, FeedbackController};
use optomech::mechanics::{Environment, MechanicalMode};

const FS: f64 = 2_097_152.0;
const DURATION: f64 = 8.0;

fn thermal_record(seed: u64) -> WelchEstimate {
    let mode = MechanicalMode::reference();
    let env = Environment::room_temperature();
    let series = synthesize_from_fn(|f| mode.thermal_psd_at(&env, f), FS, DURATION, seed).unwrap();
    welch(&series, 20.0).unwrap()
}

#[test]
fn round_trip_fidelity() {
    let mode = MechanicalMode::reference();
    let env = Environment::room_temperature();
    let est = thermal_record(11);
    assert!(est.averages >= 200, "{}", est.averages);
    let (f0, g) = (mode.resonance_frequency(), mode.linewidth());
    let band = est.spectrum.window(f0 - 5.0 * g, f0 + 5.0 * g).unwrap();
    let rbw = band.rbw_hz().unwrap();
    let expected = expected_welch_psd(|f| mode.thermal_psd_at(&env, f), rbw, band.frequencies()).unwrap();
    let mean = band
        .values()
        .iter()
        .zip(expected.values())
        .map(|(a, b)| a / b)
        .sum::<f64>()
        / band.len() as f64;
    assert!((mean - 1.0).abs() < 0.02, "{mean}");
    // 81 Hz linewidth at 20 Hz RBW: the estimated peak sits within 10% of the model
    let peak = band.values().iter().cloned().fold(0.0, f64::max).sqrt();
    assert!((peak / mode.peak_thermal_asd(&env) - 1.0).abs() < 0.10, "{peak:e}");
}

#[test]
fn fitted_q_is_unbiased_over_twenty_seeds() {
    let mode = MechanicalMode::reference();
    let env = Environment::room_temperature();
    let (f0, half) = (mode.resonance_frequency(), 15.0 * mode.linewidth());
    let qs: Vec<f64> = (100..120)
        .map(|seed| {
            let est = thermal_record(seed);
            fit_lorentzian(&est.spectrum, (f0 - half, f0 + half), &env)
                .unwrap()
                .quality_factor()
        })
        .collect();
    let mean = qs.iter().sum::<f64>() / qs.len() as f64;
    assert!((mean / mode.quality_factor() - 1.0).abs() < 0.02, "{mean} from {qs:?}");
}

#[test]
fn open_loop_temperature() {
    let mode = MechanicalMode::reference();
    let env = Environment::room_temperature();
    let est = thermal_record(21);
    let (f0, half) = (mode.resonance_frequency(), 15.0 * mode.linewidth());
    let fit = fit_lorentzian(&est.spectrum, (f0 - half, f0 + half), &env).unwrap();
    let t = equipartition_temperature(&est.spectrum, &fit, mode.effective_mass()).unwrap();
    assert!((t / 300.0 - 1.0).abs() < 0.05, "{t}");
}

#[test]
fn cooled_temperature() {
    let mode = MechanicalMode::reference();
    let env = Environment::room_temperature();
    let c = FeedbackController::ideal(59.0).unwrap();
    let psd = |f: f64| closed_loop_psd(&mode, &env, &c, &[f]).unwrap().0.values()[0];
    let series = synthesize_from_fn(psd, FS, DURATION, 22).unwrap();
    let est = welch(&series, 20.0).unwrap();
    let (f0, half) = (mode.resonance_frequency(), 15.0 * 60.0 * mode.linewidth());
    let fit = fit_lorentzian(&est.spectrum, (f0 - half, f0 + half), &env).unwrap();
    assert!((fit.linewidth / (60.0 * mode.linewidth()) - 1.0).abs() < 0.05, "{}", fit.linewidth);
    let t = equipartition_temperature(&est.spectrum, &fit, mode.effective_mass()).unwrap();
    assert!((t / 5.0 - 1.0).abs() < 0.05, "{t}");
}

#[test]
fn same_seed_same_record() {
    let mode = MechanicalMode::reference();
    let env = Environment::room_temperature();
    let a = synthesize_from_fn(|f| mode.thermal_psd_at(&env, f), FS, 0.1, 5).unwrap();
    let b = synthesize_from_fn(|f| mode.thermal_psd_at(&env, f), FS, 0.1, 5).unwrap();
    let c = synthesize_from_fn(|f| mode.thermal_psd_at(&env, f), FS, 0.1, 6).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}
