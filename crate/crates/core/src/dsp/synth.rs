//! Gaussian time series with a prescribed one-sided PSD.
//!
//! Each positive-frequency bin k of an n-point record gets an independent
//! complex Gaussian amplitude with E|X_k|² = S(f_k)·fs·n/2, so that the
//! inverse transform divided by n has variance Σ S(f_k)·fs/n. The DC and
//! Nyquist bins are left empty.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use realfft::RealFftPlanner;

use super::TimeSeries;
use crate::spectrum::NoiseSpectrum;
use crate::{Error, Result};

/// Upper bound on record length, ~1 GiB of samples.
pub const MAX_SAMPLES: usize = 1 << 27;

fn record_length(sample_rate: f64, duration: f64) -> Result<usize> {
    if !(sample_rate > 0.0) || !sample_rate.is_finite() {
        return Err(Error::Domain(format!("sample rate must be > 0, got {sample_rate}")));
    }
    if !(duration > 0.0) || !duration.is_finite() {
        return Err(Error::Domain(format!("duration must be > 0, got {duration}")));
    }
    let n = (sample_rate * duration).round();
    if n < 4.0 {
        return Err(Error::Domain(format!(
            "record of {duration} s at {sample_rate} Hz has fewer than 4 samples"
        )));
    }
    if n > MAX_SAMPLES as f64 {
        return Err(Error::Domain(format!(
            "record of {n} samples exceeds the {MAX_SAMPLES}-sample memory budget"
        )));
    }
    Ok(n as usize)
}

/// Synthesize from a PSD model given as a function of frequency.
pub fn synthesize_from_fn(
    psd: impl Fn(f64) -> f64,
    sample_rate: f64,
    duration: f64,
    seed: u64,
) -> Result<TimeSeries> {
    let n = record_length(sample_rate, duration)?;
    let half = n / 2;
    let df = sample_rate / n as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spectrum = vec![Complex64::new(0.0, 0.0); half + 1];
    // the Nyquist bin of an even record is real-valued; leave it (and DC) empty
    let last = if n % 2 == 0 { half - 1 } else { half };
    for (k, bin) in spectrum.iter_mut().enumerate().take(last + 1).skip(1) {
        let s = psd(k as f64 * df);
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::Invariant(format!(
                "model PSD at {} Hz must be finite and >= 0, got {s}",
                k as f64 * df
            )));
        }
        let sigma = (0.5 * s * sample_rate * n as f64).sqrt() / std::f64::consts::SQRT_2;
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        *bin = Complex64::new(sigma * re, sigma * im);
    }
    let mut planner = RealFftPlanner::<f64>::new();
    let c2r = planner.plan_fft_inverse(n);
    let mut samples = c2r.make_output_vec();
    c2r.process(&mut spectrum, &mut samples)
        .map_err(|e| Error::Invariant(format!("inverse FFT failed: {e}")))?;
    drop(spectrum);
    let scale = 1.0 / n as f64;
    samples.iter_mut().for_each(|v| *v *= scale);
    TimeSeries::new(sample_rate, samples, seed)
}

/// Synthesize from a tabulated model spectrum.
///
/// The model must reach the Nyquist frequency. Below its first grid point
/// the first value is held; in between it is linearly interpolated.
pub fn synthesize_timeseries(
    model: &NoiseSpectrum,
    sample_rate: f64,
    duration: f64,
    seed: u64,
) -> Result<TimeSeries> {
    let nyquist = 0.5 * sample_rate;
    if model.f_max() < nyquist * (1.0 - 1e-12) {
        return Err(Error::Domain(format!(
            "model spectrum ends at {} Hz, below the Nyquist frequency {nyquist} Hz",
            model.f_max()
        )));
    }
    let (fs, vs) = (model.frequencies(), model.values());
    // bins arrive in increasing frequency order, so a forward cursor suffices
    let cursor = std::cell::Cell::new(0usize);
    let lookup = |f: f64| {
        if f <= fs[0] || fs.len() == 1 {
            return vs[0];
        }
        let mut i = cursor.get();
        while i + 2 < fs.len() && fs[i + 1] < f {
            i += 1;
        }
        cursor.set(i);
        let t = ((f - fs[i]) / (fs[i + 1] - fs[i])).clamp(0.0, 1.0);
        vs[i] + t * (vs[i + 1] - vs[i])
    };
    synthesize_from_fn(lookup, sample_rate, duration, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::SpectrumUnit;

    fn flat(level: f64, f_max: f64) -> NoiseSpectrum {
        NoiseSpectrum::flat(vec![1.0, f_max], SpectrumUnit::Displacement, level).unwrap()
    }

    #[test]
    fn flat_model_variance() {
        let s0 = 4e-30;
        let (fs, n) = (1024.0, 1 << 16);
        let ts = synthesize_timeseries(&flat(s0, 512.0), fs, n as f64 / fs, 7).unwrap();
        let expected = s0 * fs / n as f64 * (n / 2 - 1) as f64;
        // 2·(n/2 − 1) independent Gaussian degrees of freedom
        let sigma = expected * (2.0 / (n as f64 - 2.0)).sqrt();
        assert!((ts.mean_square() - expected).abs() < 3.0 * sigma);
        assert!((expected / (s0 * fs / 2.0) - 1.0).abs() < 1e-4);
    }

    #[test]
    fn zero_model_gives_zero_series() {
        let ts = synthesize_timeseries(&flat(0.0, 50.0), 100.0, 1.0, 1).unwrap();
        assert!(ts.samples().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn deterministic_in_seed() {
        let m = flat(1.0, 500.0);
        let a = synthesize_timeseries(&m, 1000.0, 2.0, 3).unwrap();
        let b = synthesize_timeseries(&m, 1000.0, 2.0, 3).unwrap();
        let c = synthesize_timeseries(&m, 1000.0, 2.0, 4).unwrap();
        assert_eq!(a.to_bytes(), b.to_bytes());
        assert_ne!(a.samples(), c.samples());
    }

    #[test]
    fn model_must_cover_nyquist() {
        let err = synthesize_timeseries(&flat(1.0, 400.0), 1000.0, 1.0, 0).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        assert!(synthesize_timeseries(&flat(1.0, 500.0), 1000.0, 1e-3, 0).is_err());
    }
}
