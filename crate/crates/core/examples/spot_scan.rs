//! Effective mass seen by a 60 um optical spot moved across the first
//! clamped-clamped beam modes.

use optomech::mechanics::{clamped_beam_mode_shape, overlap_scan, scan_line};

fn main() -> optomech::Result<()> {
    let (length, width, areal_density) = (1e-3, 5e-4, 2.33);
    for n in 1..=3 {
        let shape = clamped_beam_mode_shape(n, length, width, areal_density, 201, 101)?;
        let scan = overlap_scan(&shape, 60e-6, &scan_line(&shape, 0.5 * width, 41))?;
        let best = scan
            .iter()
            .max_by(|a, b| a.level.total_cmp(&b.level))
            .expect("non-empty scan");
        println!(
            "mode {n}: modal mass {:.3e} kg, best spot x = {:.0} um (m_eff {:.3e} kg)",
            shape.modal_mass(),
            best.position.0 * 1e6,
            best.effective_mass
        );
        let profile: String = scan
            .iter()
            .map(|p| match p.level {
                l if l > 0.75 => '#',
                l if l > 0.5 => '+',
                l if l > 0.25 => '-',
                _ => '.',
            })
            .collect();
        println!("  {profile}");
    }
    Ok(())
}
