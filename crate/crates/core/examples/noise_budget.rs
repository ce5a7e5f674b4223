//! Compose the displacement noise budget of the reference scenario and
//! report which term limits the sensitivity where.
//!
//! cargo run --example noise_budget [path/to/scenario.cfg]

use optomech::budget::{SHOT, THERMAL};
use optomech::commands::scenario_budget;
use optomech::scenario::load_scenario;

fn main() -> optomech::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/paper.cfg").to_string());
    let scenario = load_scenario(&path)?;
    let report = scenario_budget(&scenario, &scenario.budget_frequencies())?;

    print!("{}", report.summary_text());
    let floor = report.floor()?;
    let thermal = report.component(THERMAL).expect("always present");
    for f in [5e5, 8.14e5, 1e6, 3e6] {
        println!(
            "{:>9.3e} Hz  total {:.3e}  floor {:.3e}  dominant {}",
            f,
            report.total().value_at(f)?.sqrt(),
            floor.value_at(f)?.sqrt(),
            report.dominant_at(f)
        );
    }
    let mode = &scenario.modes[0];
    let peak = thermal.value_at(mode.resonance_frequency())?.sqrt();
    let shot = report.component(SHOT).expect("always present").value_at(mode.resonance_frequency())?.sqrt();
    println!("peak over floor at {}: {:.1} dB", mode.label(), 20.0 * (peak / shot).log10());
    Ok(())
}
