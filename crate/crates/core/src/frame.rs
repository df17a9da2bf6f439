use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One complex baseband IQ sample.
pub type ComplexSample = Complex64;

/// Default number of IQ samples per example.
pub const DEFAULT_FRAME_LEN: usize = 4096;

/// Sample rate of every frame; frequencies are in cycles/sample.
pub const SAMPLE_RATE: f64 = 1.0;

/// Fixed-length sequence of complex baseband samples.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ComplexFrame {
    samples: Vec<ComplexSample>,
}

impl ComplexFrame {
    pub fn new(samples: Vec<ComplexSample>) -> Self {
        ComplexFrame { samples }
    }

    pub fn zeros(len: usize) -> Self {
        ComplexFrame {
            samples: vec![ComplexSample::new(0.0, 0.0); len],
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[ComplexSample] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [ComplexSample] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<ComplexSample> {
        self.samples
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ComplexSample> {
        self.samples.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|s| s.re.is_finite() && s.im.is_finite())
    }

    pub fn map(&self, f: impl FnMut(&ComplexSample) -> ComplexSample) -> ComplexFrame {
        ComplexFrame::new(self.samples.iter().map(f).collect())
    }

    /// `(1/len) * sum |x|^2`.
    pub fn mean_power(&self) -> Result<f64> {
        mean_power(&self.samples)
    }

    pub fn scale(&self, factor: f64) -> ComplexFrame {
        self.map(|s| s * factor)
    }

    /// Rescales to unit mean power. Fails on an all-zero frame.
    pub fn normalize_unit_power(&self) -> Result<ComplexFrame> {
        let power = self.mean_power()?;
        if power <= 0.0 {
            return Err(Error::ZeroPower);
        }
        Ok(self.scale(1.0 / power.sqrt()))
    }

    /// Truncates or zero-pads to exactly `len` samples.
    pub fn fit_to_len(mut self, len: usize) -> ComplexFrame {
        self.samples.resize(len, ComplexSample::new(0.0, 0.0));
        self
    }
}

impl From<Vec<ComplexSample>> for ComplexFrame {
    fn from(samples: Vec<ComplexSample>) -> Self {
        ComplexFrame::new(samples)
    }
}

impl std::ops::Index<usize> for ComplexFrame {
    type Output = ComplexSample;

    fn index(&self, i: usize) -> &ComplexSample {
        &self.samples[i]
    }
}

pub fn mean_power(samples: &[ComplexSample]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyFrame);
    }
    Ok(samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / samples.len() as f64)
}

/// Mean power of a slice that is known to be non-empty by construction.
pub(crate) fn power_of(samples: &[ComplexSample]) -> f64 {
    samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / samples.len().max(1) as f64
}
