//! Pulse-shaping filters.

use std::f64::consts::{LN_2, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default RRC roll-off for clean signals.
pub const CLEAN_RRC_ALPHA: f64 = 0.35;
/// Default Gaussian bandwidth-time product for clean GFSK/GMSK.
pub const CLEAN_GAUSSIAN_BT: f64 = 0.35;
/// RRC length in symbols.
pub const RRC_SPAN_SYMBOLS: usize = 11;
/// Gaussian frequency-pulse length in symbols.
pub const GAUSSIAN_SPAN_SYMBOLS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RrcFilterSpec {
    pub alpha: f64,
    pub samples_per_symbol: usize,
    pub span_symbols: usize,
}

impl RrcFilterSpec {
    pub fn new(alpha: f64, samples_per_symbol: usize) -> Self {
        RrcFilterSpec {
            alpha,
            samples_per_symbol,
            span_symbols: RRC_SPAN_SYMBOLS,
        }
    }

    pub fn num_taps(&self) -> usize {
        self.span_symbols * self.samples_per_symbol + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianFilterSpec {
    pub bt: f64,
    pub samples_per_symbol: usize,
    pub span_symbols: usize,
}

impl GaussianFilterSpec {
    pub fn new(bt: f64, samples_per_symbol: usize) -> Self {
        GaussianFilterSpec {
            bt,
            samples_per_symbol,
            span_symbols: GAUSSIAN_SPAN_SYMBOLS,
        }
    }

    pub fn num_taps(&self) -> usize {
        self.span_symbols * self.samples_per_symbol + 1
    }
}

/// Root-raised-cosine impulse response at `t` symbol periods.
fn rrc_response(t: f64, alpha: f64) -> f64 {
    if t.abs() < 1e-12 {
        return 1.0 - alpha + 4.0 * alpha / PI;
    }
    if ((4.0 * alpha * t).abs() - 1.0).abs() < 1e-9 {
        let arg = PI / (4.0 * alpha);
        return alpha / SQRT_2 * ((1.0 + 2.0 / PI) * arg.sin() + (1.0 - 2.0 / PI) * arg.cos());
    }
    let num = (PI * t * (1.0 - alpha)).sin() + 4.0 * alpha * t * (PI * t * (1.0 + alpha)).cos();
    let den = PI * t * (1.0 - (4.0 * alpha * t).powi(2));
    num / den
}

/// Unit-energy RRC taps, `span * sps + 1` long.
pub fn rrc_taps(spec: &RrcFilterSpec) -> Result<Vec<f64>> {
    if !(spec.alpha > 0.0 && spec.alpha < 1.0) {
        return Err(Error::invalid("alpha", format!("{} not in (0, 1)", spec.alpha)));
    }
    if spec.samples_per_symbol < 2 {
        return Err(Error::invalid("samples_per_symbol", "must be at least 2"));
    }
    let sps = spec.samples_per_symbol as f64;
    let half = (spec.num_taps() - 1) as f64 / 2.0;
    let mut taps: Vec<f64> = (0..spec.num_taps())
        .map(|i| rrc_response((i as f64 - half) / sps, spec.alpha))
        .collect();
    let energy = taps.iter().map(|t| t * t).sum::<f64>().sqrt();
    taps.iter_mut().for_each(|t| *t /= energy);
    Ok(taps)
}

/// Unit-sum Gaussian frequency-pulse taps with
/// `sigma = sqrt(ln 2) / (2 pi BT)` symbol periods.
pub fn gaussian_taps(spec: &GaussianFilterSpec) -> Result<Vec<f64>> {
    if !(spec.bt > 0.0 && spec.bt <= 1.0) {
        return Err(Error::invalid("bt", format!("{} not in (0, 1]", spec.bt)));
    }
    if spec.samples_per_symbol == 0 {
        return Err(Error::invalid("samples_per_symbol", "must be positive"));
    }
    let sigma = LN_2.sqrt() / (2.0 * PI * spec.bt);
    let sps = spec.samples_per_symbol as f64;
    let half = (spec.num_taps() - 1) as f64 / 2.0;
    let mut taps: Vec<f64> = (0..spec.num_taps())
        .map(|i| {
            let t = (i as f64 - half) / sps;
            (-t * t / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let sum: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= sum);
    Ok(taps)
}
