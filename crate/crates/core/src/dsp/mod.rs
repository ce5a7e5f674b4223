//! The inverse path: synthetic detector records, averaged periodograms and
//! Lorentzian fits.
//!
//! Synthesis colors white Gaussian noise in the frequency domain ([`synth`]);
//! [`welch`] estimates one-sided PSDs with a Hann window and 50% overlap;
//! [`fit`] recovers resonance parameters. [`langevin`] integrates the
//! oscillator equation directly and exists to cross-check the other three.

pub mod fit;
pub mod langevin;
pub mod synth;
pub mod welch;

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::{Error, Result};

pub use fit::{equipartition_temperature, fit_lorentzian, fit_lorentzian_with, FitModel, FitOptions, LorentzianFit};
pub use langevin::{integrate_thermal_oscillator, LangevinSettings};
pub use synth::{synthesize_from_fn, synthesize_timeseries};
pub use welch::{expected_welch_psd, hann_kernel, welch, welch_psd, WelchEstimate};

/// A uniformly sampled displacement record (m).
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    sample_rate: f64,
    samples: Vec<f64>,
    seed: u64,
}

impl TimeSeries {
    pub fn new(sample_rate: f64, samples: Vec<f64>, seed: u64) -> Result<Self> {
        if !(sample_rate > 0.0) || !sample_rate.is_finite() {
            return Err(Error::Invariant(format!(
                "sample rate must be > 0, got {sample_rate}"
            )));
        }
        if samples.is_empty() {
            return Err(Error::Invariant("time series is empty".to_string()));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invariant("time series contains non-finite samples".to_string()));
        }
        Ok(Self {
            sample_rate,
            samples,
            seed,
        })
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }

    /// Sample mean of x².
    pub fn mean_square(&self) -> f64 {
        self.samples.iter().map(|v| v * v).sum::<f64>() / self.samples.len() as f64
    }

    fn header(&self) -> String {
        format!(
            "sample_rate={:e} length={} seed={}\n",
            self.sample_rate,
            self.samples.len(),
            self.seed
        )
    }

    /// One text header line, then little-endian f64 samples.
    pub fn to_bytes(&self) -> Vec<u8> {
        let header = self.header();
        let mut out = Vec::with_capacity(header.len() + 8 * self.samples.len());
        out.extend_from_slice(header.as_bytes());
        for v in &self.samples {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8], origin: &str) -> Result<Self> {
        let err = |message: String| Error::Parse {
            path: origin.to_string(),
            message,
        };
        let newline = bytes
            .iter()
            .position(|b| *b == b'\n')
            .ok_or_else(|| err("missing header line".to_string()))?;
        let header = std::str::from_utf8(&bytes[..newline])
            .map_err(|_| err("header is not UTF-8".to_string()))?;
        let (mut rate, mut length, mut seed) = (None, None, None);
        for token in header.split_whitespace() {
            let (k, v) = token
                .split_once('=')
                .ok_or_else(|| err(format!("malformed header token `{token}`")))?;
            let bad = |e: &dyn std::fmt::Display| err(format!("bad {k} `{v}`: {e}"));
            match k {
                "sample_rate" => rate = Some(v.parse::<f64>().map_err(|e| bad(&e))?),
                "length" => length = Some(v.parse::<usize>().map_err(|e| bad(&e))?),
                "seed" => seed = Some(v.parse::<u64>().map_err(|e| bad(&e))?),
                other => return Err(err(format!("unknown header key `{other}`"))),
            }
        }
        let (rate, length, seed) = match (rate, length, seed) {
            (Some(r), Some(l), Some(s)) => (r, l, s),
            _ => return Err(err("header needs sample_rate, length and seed".to_string())),
        };
        let body = &bytes[newline + 1..];
        if body.len() != 8 * length {
            return Err(err(format!(
                "header announces {length} samples but body holds {} bytes",
                body.len()
            )));
        }
        let samples = body
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        Self::new(rate, samples, seed).map_err(|e| err(e.to_string()))
    }

    pub fn write_binary(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        file.write_all(&self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn read_binary(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes, &path.display().to_string())
    }

    /// `time_s,value` CSV; meant for short records.
    pub fn to_csv_string(&self) -> String {
        let mut out = format!("# {}time_s,value\n", self.header());
        for (i, v) in self.samples.iter().enumerate() {
            out.push_str(&format!("{:e},{v:e}\n", i as f64 / self.sample_rate));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_round_trip() {
        let ts = TimeSeries::new(1e6, vec![1.0, -2.5e-14, 3.0, 0.0], 42).unwrap();
        let bytes = ts.to_bytes();
        assert!(bytes.starts_with(b"sample_rate=1e6 length=4 seed=42\n"));
        assert_eq!(TimeSeries::from_bytes(&bytes, "mem").unwrap(), ts);
        assert!(TimeSeries::from_bytes(&bytes[..bytes.len() - 1], "mem").is_err());
    }

    #[test]
    fn csv_export() {
        let ts = TimeSeries::new(2.0, vec![1.0, 2.0], 0).unwrap();
        let csv = ts.to_csv_string();
        assert!(csv.contains("time_s,value\n0e0,1e0\n5e-1,2e0\n"));
    }

    #[test]
    fn rejects_bad_records() {
        assert!(TimeSeries::new(0.0, vec![1.0], 0).is_err());
        assert!(TimeSeries::new(1.0, vec![], 0).is_err());
        assert!(TimeSeries::new(1.0, vec![f64::NAN], 0).is_err());
    }
}
