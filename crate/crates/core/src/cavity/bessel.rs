//! Bessel functions of the first kind for the small arguments used as
//! phase-modulation depths.

/// Power series for J_n(x); accurate to ~1e-15 for |x| <= 5.
fn series(order: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let q = -half * half;
    // first term (x/2)^n / n!
    let mut term = (1..=order).fold(1.0, |acc, k| acc * half / k as f64);
    let mut sum = term;
    for k in 1..60u32 {
        term *= q / (k as f64 * (k + order) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

pub fn j0(x: f64) -> f64 {
    series(0, x)
}

pub fn j1(x: f64) -> f64 {
    series(1, x)
}
