//! Mode shapes and their overlap with the intracavity optical spot.
//!
//! The readout sees a Gaussian-weighted average of the surface displacement,
//! so the effective mass of a mode depends on where the spot sits:
//!
//! m_eff(spot) = ∫ρ_s·u² dA / (∫u·w dA)²
//!
//! with `w` the normalized intensity profile of the spot and `ρ_s` the areal
//! density. Amplitudes are normalized to max|u| = 1.

use std::f64::consts::PI;

use crate::{Error, Result};

/// Number of tabulated clamped-clamped modes.
pub const MAX_BEAM_MODE: usize = 10;

/// Analytic Euler-Bernoulli clamped-clamped beam eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClampedBeamMode {
    index: usize,
    length: f64,
    beta_l: f64,
    sigma: f64,
    one_minus_sigma: f64,
    norm: f64,
}

impl ClampedBeamMode {
    pub fn new(index: usize, length: f64) -> Result<Self> {
        if index == 0 || index > MAX_BEAM_MODE {
            return Err(Error::Domain(format!(
                "clamped-beam mode index must lie in 1..={MAX_BEAM_MODE}, got {index}"
            )));
        }
        if !(length > 0.0) {
            return Err(Error::Domain(format!("beam length must be > 0, got {length}")));
        }
        let z = clamped_beam_root(index);
        let den = z.sinh() - z.sin();
        let sigma = (z.cosh() - z.cos()) / den;
        // 1 − σ without cancellation: sinh − cosh = −e^{−z}
        let one_minus_sigma = (-(-z).exp() - z.sin() + z.cos()) / den;
        let mut mode = Self {
            index,
            length,
            beta_l: z,
            sigma,
            one_minus_sigma,
            norm: 1.0,
        };
        mode.norm = mode.max_abs_raw();
        Ok(mode)
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// β_n·length, the n-th positive root of cos(z)·cosh(z) = 1.
    pub fn beta_l(&self) -> f64 {
        self.beta_l
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Unnormalized u(s) and u′(s)/β at s = β·x, stable for large β·length.
    fn raw(&self, s: f64) -> (f64, f64) {
        let (e_pos, e_neg) = (0.5 * s.exp(), 0.5 * (-s).exp());
        let (one_minus, one_plus) = (self.one_minus_sigma, 1.0 + self.sigma);
        let u = e_pos * one_minus + e_neg * one_plus - s.cos() + self.sigma * s.sin();
        let du = e_pos * one_minus - e_neg * one_plus + s.sin() + self.sigma * s.cos();
        (u, du)
    }

    /// Evaluate on the half of the beam nearer x = 0 and apply parity.
    fn folded(&self, x: f64) -> (f64, f64) {
        let half = 0.5 * self.length;
        let beta = self.beta_l / self.length;
        // odd modes are symmetric about the centre, even modes antisymmetric
        let parity = if self.index % 2 == 1 { 1.0 } else { -1.0 };
        if x <= half {
            self.raw(beta * x)
        } else {
            let (u, du) = self.raw(beta * (self.length - x));
            (parity * u, -parity * du)
        }
    }

    fn max_abs_raw(&self) -> f64 {
        let n = 4000;
        let (mut best, mut best_x) = (0.0f64, 0.0);
        for i in 0..=n {
            let x = self.length * i as f64 / n as f64;
            let v = self.folded(x).0.abs();
            if v > best {
                best = v;
                best_x = x;
            }
        }
        let h = self.length / n as f64;
        let x = crate::numeric::golden_section_max(
            |x| self.folded(x).0.abs(),
            (best_x - h).max(0.0),
            (best_x + h).min(self.length),
            1e-14,
        );
        best.max(self.folded(x).0.abs())
    }

    /// Displacement normalized so that max|u| = 1; `x` in metres along the beam.
    pub fn displacement(&self, x: f64) -> f64 {
        self.folded(x.clamp(0.0, self.length)).0 / self.norm
    }

    /// du/dx of the normalized displacement, 1/m.
    pub fn slope(&self, x: f64) -> f64 {
        let beta = self.beta_l / self.length;
        beta * self.folded(x.clamp(0.0, self.length)).1 / self.norm
    }
}

/// n-th root of cos(z)·cosh(z) = 1 by Newton iteration from (n + ½)π.
pub fn clamped_beam_root(n: usize) -> f64 {
    let g = |z: f64| z.cos() - 1.0 / z.cosh();
    let dg = |z: f64| -z.sin() + z.sinh() / z.cosh().powi(2);
    let mut z = (n as f64 + 0.5) * PI;
    for _ in 0..50 {
        let step = g(z) / dg(z);
        z -= step;
        if step.abs() < 1e-15 * z {
            break;
        }
    }
    z
}

/// Displacement amplitudes on a regular lateral lattice, normalized to max|u| = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeShape {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Row-major, `amplitudes[iy * nx + ix]`.
    amplitudes: Vec<f64>,
    areal_density: f64,
}

fn check_axis(name: &str, axis: &[f64]) -> Result<()> {
    if axis.len() < 2 {
        return Err(Error::Invariant(format!("mode-shape {name} axis needs >= 2 points")));
    }
    let step = (axis[axis.len() - 1] - axis[0]) / (axis.len() - 1) as f64;
    if !(step > 0.0) {
        return Err(Error::Invariant(format!("mode-shape {name} axis must increase")));
    }
    for (i, v) in axis.iter().enumerate() {
        let expected = axis[0] + step * i as f64;
        if (v - expected).abs() > 1e-6 * step {
            return Err(Error::Invariant(format!(
                "mode-shape {name} axis is not a regular lattice at index {i}"
            )));
        }
    }
    Ok(())
}

impl ModeShape {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, amplitudes: Vec<f64>, areal_density: f64) -> Result<Self> {
        check_axis("x", &xs)?;
        check_axis("y", &ys)?;
        if amplitudes.len() != xs.len() * ys.len() {
            return Err(Error::Invariant(format!(
                "expected {} amplitudes for a {}x{} lattice, got {}",
                xs.len() * ys.len(),
                xs.len(),
                ys.len(),
                amplitudes.len()
            )));
        }
        if !(areal_density > 0.0) {
            return Err(Error::validation(
                "areal_density_kg_m2",
                format!("must be > 0, got {areal_density}"),
            ));
        }
        let peak = amplitudes.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !(peak > 0.0) || !peak.is_finite() {
            return Err(Error::Invariant("mode shape is identically zero".to_string()));
        }
        let amplitudes = amplitudes.into_iter().map(|v| v / peak).collect();
        Ok(Self {
            xs,
            ys,
            amplitudes,
            areal_density,
        })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn areal_density(&self) -> f64 {
        self.areal_density
    }

    pub fn amplitude(&self, ix: usize, iy: usize) -> f64 {
        self.amplitudes[iy * self.xs.len() + ix]
    }

    /// x and y extents of the lattice.
    pub fn extent(&self) -> ((f64, f64), (f64, f64)) {
        (
            (self.xs[0], *self.xs.last().unwrap()),
            (self.ys[0], *self.ys.last().unwrap()),
        )
    }

    /// ∫ρ_s·u² dA, kg.
    pub fn modal_mass(&self) -> f64 {
        let wx = trapezoid_weights(&self.xs);
        let wy = trapezoid_weights(&self.ys);
        let nx = self.xs.len();
        let mut sum = 0.0;
        for (iy, wyj) in wy.iter().enumerate() {
            let row = &self.amplitudes[iy * nx..(iy + 1) * nx];
            sum += wyj * row.iter().zip(&wx).map(|(u, w)| u * u * w).sum::<f64>();
        }
        self.areal_density * sum
    }
}

fn trapezoid_weights(axis: &[f64]) -> Vec<f64> {
    let n = axis.len();
    let mut w = vec![0.0; n];
    for i in 0..n - 1 {
        let h = axis[i + 1] - axis[i];
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    w
}

/// Clamped-clamped beam mode extruded across the beam width.
///
/// The beam runs along x over `[0, length]`; y spans `[0, width]`.
pub fn clamped_beam_mode_shape(
    mode_index: usize,
    length: f64,
    width: f64,
    areal_density: f64,
    nx: usize,
    ny: usize,
) -> Result<ModeShape> {
    let beam = ClampedBeamMode::new(mode_index, length)?;
    if !(width > 0.0) {
        return Err(Error::Domain(format!("beam width must be > 0, got {width}")));
    }
    if nx < 2 || ny < 2 {
        return Err(Error::Domain("mode-shape grid needs >= 2 points per axis".to_string()));
    }
    let xs: Vec<f64> = (0..nx).map(|i| length * i as f64 / (nx - 1) as f64).collect();
    let ys: Vec<f64> = (0..ny).map(|j| width * j as f64 / (ny - 1) as f64).collect();
    let profile: Vec<f64> = xs.iter().map(|&x| beam.displacement(x)).collect();
    let amplitudes = (0..ny).flat_map(|_| profile.iter().copied()).collect();
    ModeShape::new(xs, ys, amplitudes, areal_density)
}

/// Gaussian intensity spot on the resonator surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalSpot {
    center: (f64, f64),
    waist: f64,
}

impl OpticalSpot {
    /// `waist` is the 1/e² intensity radius.
    pub fn new(center: (f64, f64), waist: f64) -> Result<Self> {
        if !(waist > 0.0) {
            return Err(Error::validation("waist_m", format!("must be > 0, got {waist}")));
        }
        Ok(Self { center, waist })
    }

    pub fn center(&self) -> (f64, f64) {
        self.center
    }

    pub fn waist(&self) -> f64 {
        self.waist
    }

    /// Normalized 1-D factor of the separable intensity weight along one axis.
    fn axis_weight(&self, offset: f64) -> f64 {
        let w = self.waist;
        (2.0 / PI).sqrt() / w * (-2.0 * offset * offset / (w * w)).exp()
    }
}

/// Coupling of a mode shape to an optical spot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpotCoupling {
    /// ∫u·w dA (dimensionless).
    pub overlap: f64,
    /// ∫ρ_s·u² dA, kg.
    pub modal_mass: f64,
    /// Fraction of the spot's intensity falling on the lattice.
    pub captured_fraction: f64,
}

impl SpotCoupling {
    /// Effective mass in kg; `f64::INFINITY` when the spot sits on a node.
    pub fn effective_mass(&self) -> f64 {
        if self.is_on_node() {
            f64::INFINITY
        } else {
            self.modal_mass / (self.overlap * self.overlap)
        }
    }

    /// Readout level relative to a point probe at a unit antinode, ∝ 1/√m_eff.
    pub fn relative_level(&self) -> f64 {
        if self.is_on_node() {
            0.0
        } else {
            self.overlap.abs() / self.modal_mass.sqrt()
        }
    }

    pub fn is_on_node(&self) -> bool {
        self.overlap.abs() <= 1e-12 * self.captured_fraction
    }

    /// True when less than 99 % of the spot lands on the resonator.
    pub fn edge_truncated(&self) -> bool {
        self.captured_fraction < 0.99
    }
}

/// Overlap integrals of a mode shape with a Gaussian spot (2-D trapezoid rule).
pub fn effective_mass_at_spot(shape: &ModeShape, spot: &OpticalSpot) -> Result<SpotCoupling> {
    let coupling = coupling_at(shape, spot)?;
    if coupling.edge_truncated() {
        let (cx, cy) = spot.center();
        log::warn!(
            "spot at ({cx:.3e}, {cy:.3e}) m loses {:.1}% of its intensity off the resonator edge",
            100.0 * (1.0 - coupling.captured_fraction)
        );
    }
    Ok(coupling)
}

fn coupling_at(shape: &ModeShape, spot: &OpticalSpot) -> Result<SpotCoupling> {
    let ((x0, x1), (y0, y1)) = shape.extent();
    let (cx, cy) = spot.center();
    let tol = 1e-9 * (x1 - x0).max(y1 - y0);
    if cx < x0 - tol || cx > x1 + tol || cy < y0 - tol || cy > y1 + tol {
        return Err(Error::Domain(format!(
            "spot centre ({cx}, {cy}) outside the mode-shape lattice"
        )));
    }
    let wx = trapezoid_weights(&shape.xs);
    let wy = trapezoid_weights(&shape.ys);
    let gx: Vec<f64> = shape.xs.iter().map(|&x| spot.axis_weight(x - cx)).collect();
    let gy: Vec<f64> = shape.ys.iter().map(|&y| spot.axis_weight(y - cy)).collect();
    let nx = shape.xs.len();
    let mut overlap = 0.0;
    for (iy, (&wyj, &gyj)) in wy.iter().zip(&gy).enumerate() {
        if gyj == 0.0 {
            continue;
        }
        let row = &shape.amplitudes[iy * nx..(iy + 1) * nx];
        let inner: f64 = row
            .iter()
            .zip(wx.iter().zip(&gx))
            .map(|(u, (w, g))| u * w * g)
            .sum();
        overlap += wyj * gyj * inner;
    }
    let captured_x: f64 = wx.iter().zip(&gx).map(|(w, g)| w * g).sum();
    let captured_y: f64 = wy.iter().zip(&gy).map(|(w, g)| w * g).sum();
    Ok(SpotCoupling {
        overlap,
        modal_mass: shape.modal_mass(),
        captured_fraction: (captured_x * captured_y).min(1.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub position: (f64, f64),
    /// Thermal-peak ASD relative to its maximum over the scan.
    pub level: f64,
    pub effective_mass: f64,
    pub edge_truncated: bool,
}

/// Relative readout level of a mode as the spot is moved across the resonator.
pub fn overlap_scan(shape: &ModeShape, waist: f64, positions: &[(f64, f64)]) -> Result<Vec<ScanPoint>> {
    if positions.is_empty() {
        return Err(Error::Domain("overlap scan needs at least one position".to_string()));
    }
    let couplings = positions
        .iter()
        .map(|&p| coupling_at(shape, &OpticalSpot::new(p, waist)?))
        .collect::<Result<Vec<_>>>()?;
    let truncated = couplings.iter().filter(|c| c.edge_truncated()).count();
    if truncated > 0 {
        log::warn!("{truncated} of {} scan positions lose more than 1% of the spot off the resonator edge", positions.len());
    }
    let max = couplings
        .iter()
        .map(SpotCoupling::relative_level)
        .fold(0.0f64, f64::max);
    Ok(positions
        .iter()
        .zip(&couplings)
        .map(|(&position, c)| ScanPoint {
            position,
            level: if max > 0.0 { c.relative_level() / max } else { 0.0 },
            effective_mass: c.effective_mass(),
            edge_truncated: c.edge_truncated(),
        })
        .collect())
}

/// Evenly spaced spot positions along x at fixed y, spanning the lattice.
pub fn scan_line(shape: &ModeShape, y: f64, n: usize) -> Vec<(f64, f64)> {
    let ((x0, x1), _) = shape.extent();
    if n == 1 {
        return vec![(0.5 * (x0 + x1), y)];
    }
    (0..n)
        .map(|i| (x0 + (x1 - x0) * i as f64 / (n - 1) as f64, y))
        .collect()
}
