//! Averaged periodograms.
//!
//! The resolution bandwidth is the equivalent noise bandwidth (ENBW) of the
//! Hann window, 1.5·fs/N for a segment of N samples. Segments overlap by
//! 50%. The estimate is normalized so that white noise of one-sided PSD s0
//! reads s0 and a tone of rms amplitude a integrates to a².

use std::f64::consts::PI;

use num_complex::Complex64;
use realfft::RealFftPlanner;

use super::TimeSeries;
use crate::spectrum::{NoiseSpectrum, SpectrumUnit};
use crate::{Error, Result};

/// ENBW of the Hann window in bins.
pub const HANN_ENBW_BINS: f64 = 1.5;

#[derive(Debug, Clone, PartialEq)]
pub struct WelchEstimate {
    pub spectrum: NoiseSpectrum,
    pub segment_length: usize,
    pub averages: usize,
}

/// Smallest 2·3·5·7-smooth integer >= n, so segment FFTs stay fast.
fn smooth_length(n: usize) -> usize {
    let mut m = n.max(2);
    loop {
        let mut r = m;
        for p in [2, 3, 5, 7] {
            while r.is_multiple_of(p) {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

fn hann(n: usize) -> Vec<f64> {
    // periodic form: exact 50% overlap-add, ENBW exactly 1.5 bins
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos())
        .collect()
}

/// Welch estimate at (approximately) the requested resolution bandwidth.
///
/// The segment length is rounded up to a smooth FFT size; the RBW actually
/// achieved is attached to the returned spectrum.
pub fn welch(series: &TimeSeries, resolution_bandwidth: f64) -> Result<WelchEstimate> {
    if !(resolution_bandwidth > 0.0) {
        return Err(Error::Domain(format!(
            "resolution bandwidth must be > 0, got {resolution_bandwidth}"
        )));
    }
    let fs = series.sample_rate();
    let target = (HANN_ENBW_BINS * fs / resolution_bandwidth).floor() as usize;
    let n = smooth_length(target);
    if n % 2 == 1 || n > series.len() {
        return Err(Error::Domain(format!(
            "record of {} samples is shorter than one {n}-sample segment at {resolution_bandwidth} Hz RBW",
            series.len()
        )));
    }
    let step = n / 2;
    let averages = (series.len() - n) / step + 1;
    let window = hann(n);
    let window_power: f64 = window.iter().map(|w| w * w).sum();

    let mut planner = RealFftPlanner::<f64>::new();
    let r2c = planner.plan_fft_forward(n);
    let mut buffer = r2c.make_input_vec();
    let mut out = r2c.make_output_vec();
    let mut acc = vec![0.0f64; n / 2 + 1];
    let x = series.samples();
    for seg in 0..averages {
        let start = seg * step;
        for (b, (v, w)) in buffer.iter_mut().zip(x[start..start + n].iter().zip(&window)) {
            *b = v * w;
        }
        r2c.process(&mut buffer, &mut out)
            .map_err(|e| Error::Invariant(format!("forward FFT failed: {e}")))?;
        for (a, c) in acc.iter_mut().zip(&out) {
            *a += Complex64::norm_sqr(c);
        }
    }
    let norm = 2.0 / (fs * window_power * averages as f64);
    let last = acc.len() - 1;
    let values: Vec<f64> = acc
        .iter()
        .enumerate()
        .map(|(k, a)| {
            // DC and Nyquist have no mirror image
            let one_sided = if k == 0 || k == last { 0.5 } else { 1.0 };
            a * norm * one_sided
        })
        .collect();
    let frequencies = (0..=last).map(|k| k as f64 * fs / n as f64).collect();
    let rbw = HANN_ENBW_BINS * fs / n as f64;
    let spectrum = NoiseSpectrum::new(frequencies, values, SpectrumUnit::Displacement)?.with_rbw(rbw);
    Ok(WelchEstimate {
        spectrum,
        segment_length: n,
        averages,
    })
}

pub fn welch_psd(series: &TimeSeries, resolution_bandwidth: f64) -> Result<NoiseSpectrum> {
    Ok(welch(series, resolution_bandwidth)?.spectrum)
}

/// Kernel taps per bin of the sampled Hann spectral window.
const KERNEL_TAPS_PER_BIN: usize = 20;
/// Kernel half-width in bins; sidelobes beyond carry < 1e-6 of the power.
const KERNEL_HALF_WIDTH_BINS: usize = 6;

/// Hann spectral window |W(ν)|² sampled at offsets (Hz), normalized to unit sum.
///
/// Convolving a smooth PSD with this kernel gives the expectation of a Welch
/// estimate made at `rbw` (the ENBW).
pub fn hann_kernel(rbw: f64) -> Vec<(f64, f64)> {
    let bin = rbw / HANN_ENBW_BINS;
    let half = (KERNEL_HALF_WIDTH_BINS * KERNEL_TAPS_PER_BIN) as i64;
    let mut taps: Vec<(f64, f64)> = (-half..=half)
        .map(|j| {
            let x = j as f64 / KERNEL_TAPS_PER_BIN as f64;
            let shape = if (x.abs() - 1.0).abs() < 1e-12 {
                0.5
            } else if x == 0.0 {
                1.0
            } else {
                (PI * x).sin() / (PI * x) / (1.0 - x * x)
            };
            (x * bin, shape * shape)
        })
        .collect();
    let total: f64 = taps.iter().map(|t| t.1).sum();
    taps.iter_mut().for_each(|t| t.1 /= total);
    taps
}

/// Expected Welch estimate of a model PSD at the given RBW, on `frequencies`.
pub fn expected_welch_psd(psd: impl Fn(f64) -> f64, rbw: f64, frequencies: &[f64]) -> Result<NoiseSpectrum> {
    let kernel = hann_kernel(rbw);
    NoiseSpectrum::from_fn(frequencies.to_vec(), SpectrumUnit::Displacement, |f| {
        kernel.iter().map(|(dv, k)| k * psd((f + dv).abs())).sum()
    })
}
