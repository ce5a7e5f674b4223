//! Cold damping of the 814 kHz mode: an ideal loop cools without bound,
//! a loop fed with shot-noise imprecision has an optimum gain.

use optomech::feedback::{
    effective_temperature, effective_temperature_analytic, gain_sweep, optimal_gain, optimal_gain_analytic,
    FeedbackController,
};
use optomech::mechanics::{Environment, MechanicalMode};
use optomech::FrequencyGrid;

fn main() -> optomech::Result<()> {
    let mode = MechanicalMode::reference();
    let env = Environment::room_temperature();
    let grid = FrequencyGrid::linear(7e5, 9.5e5, 500)?;

    println!("ideal loop");
    println!("gain   t_eff_k   linewidth_hz");
    let sweep = gain_sweep(&mode, &env, &FeedbackController::ideal(0.0)?, &[0.0, 1.0, 3.0, 9.0, 59.0], &grid)?;
    for r in &sweep {
        println!("{:<6} {:<9.3} {:.1}", r.gain, r.effective_temperature, r.effective_linewidth);
    }

    let s_imp = (4e-19_f64).powi(2);
    println!("\nimprecision 4e-19 m/rtHz");
    println!("gain      numeric_k  closed_form_k");
    for g in [10.0, 100.0, 1e3, 1e4, 1e5] {
        let c = FeedbackController::new(g, s_imp)?;
        let t = effective_temperature(&mode, &env, &c)?;
        println!("{g:<9.0e} {:<10.4} {:.4}", t.temperature, effective_temperature_analytic(&mode, &env, &c));
    }
    let best = optimal_gain(&mode, &env, s_imp, 1e6)?;
    println!(
        "optimum g = {:.0} (closed form {:.0}), T_min = {:.4} K",
        best.gain,
        optimal_gain_analytic(&mode, &env, s_imp),
        best.temperature
    );
    Ok(())
}
