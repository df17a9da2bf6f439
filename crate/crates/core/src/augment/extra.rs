//! Additional transforms: front-end and channel effects beyond the
//! RandAugment set.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::dsp::{fft_in_place, filter_same, ifft_in_place};
use crate::error::{Error, Result};
use crate::frame::{ComplexFrame, ComplexSample};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RolloffSide {
    Lower,
    Upper,
    Both,
}

impl RolloffSide {
    pub const ALL: [RolloffSide; 3] = [RolloffSide::Lower, RolloffSide::Upper, RolloffSide::Both];
}

/// Raised-cosine spectral taper over the outer `edge_frac` (cycles/sample)
/// of the chosen band edge(s): zero gain at `|f| = 0.5`, unity at
/// `|f| = 0.5 - edge_frac`.
pub fn signal_rolloff(frame: &ComplexFrame, side: RolloffSide, edge_frac: f64) -> Result<ComplexFrame> {
    if !(0.0..=0.5).contains(&edge_frac) {
        return Err(Error::invalid("edge_frac", format!("{edge_frac} not in [0, 0.5]")));
    }
    if edge_frac == 0.0 {
        return Ok(frame.clone());
    }
    let n = frame.len();
    let mut buf = frame.samples().to_vec();
    fft_in_place(&mut buf);
    for (k, v) in buf.iter_mut().enumerate() {
        let f = if 2 * k >= n {
            k as f64 / n as f64 - 1.0
        } else {
            k as f64 / n as f64
        };
        let on_side = match side {
            RolloffSide::Both => true,
            RolloffSide::Lower => f < 0.0,
            // The Nyquist bin sits at -0.5 and belongs to both edges.
            RolloffSide::Upper => f > 0.0 || 2 * k == n,
        };
        let d = 0.5 - f.abs();
        if on_side && d < edge_frac {
            *v *= 0.5 * (1.0 - (PI * d / edge_frac).cos());
        }
    }
    ifft_in_place(&mut buf);
    Ok(ComplexFrame::new(buf))
}

/// Random-walk local-oscillator drift: per-sample frequency steps uniform
/// in `±drift_rate`, reset to zero whenever `|f|` exceeds `max_drift`.
pub fn lo_drift(frame: &ComplexFrame, rng: &mut RngStream, drift_rate: f64, max_drift: f64) -> Result<ComplexFrame> {
    if !(drift_rate >= 0.0 && (0.0..0.5).contains(&max_drift)) {
        return Err(Error::invalid(
            "lo_drift",
            "need drift_rate >= 0 and 0 <= max_drift < 0.5",
        ));
    }
    if drift_rate == 0.0 {
        return Ok(frame.clone());
    }
    let mut f = 0.0;
    let mut theta = 0.0;
    let out = frame
        .iter()
        .map(|s| {
            f += rng.uniform_range(-drift_rate, drift_rate);
            if f.abs() > max_drift {
                f = 0.0;
            }
            theta = (theta + TAU * f) % TAU;
            s * ComplexSample::from_polar(1.0, theta)
        })
        .collect();
    Ok(ComplexFrame::new(out))
}

/// Per-sample SNR trajectory in dB: piecewise linear between the two
/// levels, reversing slope at `inflections` random interior points.
pub fn snr_profile(len: usize, rng: &mut RngStream, snr_low_db: f64, snr_high_db: f64, inflections: usize) -> Vec<f64> {
    let mut knots: Vec<usize> = (0..inflections)
        .map(|_| 1 + rng.index(len.saturating_sub(1).max(1)))
        .collect();
    knots.sort_unstable();
    knots.insert(0, 0);
    knots.push(len.saturating_sub(1));
    let mut level = if rng.bernoulli(0.5) { snr_low_db } else { snr_high_db };
    let mut values = Vec::with_capacity(knots.len());
    for _ in 0..knots.len() {
        values.push(level);
        level = if level == snr_low_db { snr_high_db } else { snr_low_db };
    }
    let mut out = vec![values[0]; len];
    for w in 0..knots.len() - 1 {
        let (a, b) = (knots[w], knots[w + 1]);
        for (n, o) in out.iter_mut().enumerate().take(b + 1).skip(a) {
            let t = if b > a { (n - a) as f64 / (b - a) as f64 } else { 0.0 };
            *o = values[w] + (values[w + 1] - values[w]) * t;
        }
    }
    out
}

/// Adds complex Gaussian noise whose per-sample power follows
/// [`snr_profile`] relative to the frame's mean power.
pub fn time_varying_noise(
    frame: &ComplexFrame,
    rng: &mut RngStream,
    snr_low_db: f64,
    snr_high_db: f64,
    inflections: usize,
) -> Result<ComplexFrame> {
    if !(snr_low_db.is_finite() && snr_high_db.is_finite() && snr_low_db <= snr_high_db) {
        return Err(Error::invalid("snr", "need finite snr_low_db <= snr_high_db"));
    }
    let power = frame.mean_power()?;
    let profile = snr_profile(frame.len(), rng, snr_low_db, snr_high_db, inflections);
    let out = frame
        .iter()
        .zip(&profile)
        .map(|(s, snr)| {
            let sigma = (power * 10f64.powf(-snr / 10.0) / 2.0).sqrt();
            let (a, b) = rng.normal_pair();
            s + ComplexSample::new(a, b) * sigma
        })
        .collect();
    Ok(ComplexFrame::new(out))
}

/// Clamps I and Q independently to `±percentage * max |component|`.
pub fn clip(frame: &ComplexFrame, percentage: f64) -> Result<ComplexFrame> {
    if !(percentage > 0.0 && percentage <= 1.0) {
        return Err(Error::invalid("percentage", format!("{percentage} not in (0, 1]")));
    }
    let m = frame.iter().fold(0.0f64, |m, s| m.max(s.re.abs()).max(s.im.abs()));
    let bound = percentage * m;
    Ok(frame.map(|s| ComplexSample::new(s.re.clamp(-bound, bound), s.im.clamp(-bound, bound))))
}

/// `y[n] = x[n] + (x[n] - x[n-1])`, `y[0] = x[0]`.
pub fn add_slope(frame: &ComplexFrame) -> ComplexFrame {
    let x = frame.samples();
    let out = (0..x.len())
        .map(|n| if n == 0 { x[0] } else { x[n] + (x[n] - x[n - 1]) })
        .collect();
    ComplexFrame::new(out)
}

/// Filters with `num_taps` taps uniform in `[0, 1)` normalized to unit
/// energy and blends `alpha * filtered + (1 - alpha) * x`.
pub fn random_convolve(frame: &ComplexFrame, rng: &mut RngStream, num_taps: usize, alpha: f64) -> Result<ComplexFrame> {
    if num_taps == 0 {
        return Err(Error::invalid("num_taps", "need at least one tap"));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::invalid("alpha", format!("{alpha} not in [0, 1]")));
    }
    let mut taps: Vec<f64> = (0..num_taps).map(|_| rng.uniform()).collect();
    let norm = taps.iter().map(|t| t * t).sum::<f64>().sqrt();
    if norm == 0.0 {
        taps = vec![0.0; num_taps];
        taps[0] = 1.0;
    } else {
        taps.iter_mut().for_each(|t| *t /= norm);
    }
    if alpha == 0.0 {
        return Ok(frame.clone());
    }
    let filtered = filter_same(frame.samples(), &taps);
    let out = filtered
        .iter()
        .zip(frame.iter())
        .map(|(f, x)| f * alpha + x * (1.0 - alpha))
        .collect();
    Ok(ComplexFrame::new(out))
}

/// Random-walk gain `1 + d[n]`: steps uniform in `±drift_rate`, `d` reset
/// to zero whenever it leaves `±max_drift`.
pub fn gain_drift(frame: &ComplexFrame, rng: &mut RngStream, drift_rate: f64, max_drift: f64) -> Result<ComplexFrame> {
    if !(drift_rate >= 0.0 && (0.0..1.0).contains(&max_drift)) {
        return Err(Error::invalid(
            "gain_drift",
            "need drift_rate >= 0 and 0 <= max_drift < 1",
        ));
    }
    if drift_rate == 0.0 {
        return Ok(frame.clone());
    }
    let mut d = 0.0;
    let out = frame
        .iter()
        .map(|s| {
            d += rng.uniform_range(-drift_rate, drift_rate);
            if d.abs() > max_drift {
                d = 0.0;
            }
            s * (1.0 + d)
        })
        .collect();
    Ok(ComplexFrame::new(out))
}

/// Log-domain automatic gain control parameters. Levels are natural logs
/// of sample magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgcParams {
    pub initial_gain: f64,
    pub level_alpha: f64,
    pub track_alpha: f64,
    pub overflow_alpha: f64,
    pub acquire_alpha: f64,
    pub reference_level: f64,
    pub track_range: f64,
    pub low_level: f64,
    pub high_level: f64,
}

impl Default for AgcParams {
    fn default() -> Self {
        AgcParams {
            initial_gain: 0.0,
            level_alpha: 0.05,
            track_alpha: 0.01,
            overflow_alpha: 0.3,
            acquire_alpha: 0.1,
            reference_level: 0.0,
            track_range: 1.0,
            low_level: -10.0,
            high_level: 3.0,
        }
    }
}

impl AgcParams {
    pub fn validate(&self) -> Result<()> {
        for (name, a) in [
            ("level_alpha", self.level_alpha),
            ("track_alpha", self.track_alpha),
            ("overflow_alpha", self.overflow_alpha),
            ("acquire_alpha", self.acquire_alpha),
        ] {
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::invalid(name, format!("{a} not in [0, 1]")));
            }
        }
        if !(self.track_range >= 0.0 && self.low_level < self.high_level) {
            return Err(Error::invalid(
                "agc",
                "need track_range >= 0 and low_level < high_level",
            ));
        }
        Ok(())
    }
}

/// Runs the AGC loop and returns the output with the per-sample log gain.
///
/// Per sample: the input level `ln|x|` feeds a one-pole estimate; below
/// `low_level` the gain is held. Otherwise `error = reference - estimate -
/// gain` is applied with `overflow_alpha` when the output level exceeds
/// `high_level`, `acquire_alpha` when `|error| > track_range`, else
/// `track_alpha`. Output is `x * exp(gain)`.
pub fn agc_trace(frame: &ComplexFrame, params: &AgcParams) -> Result<(ComplexFrame, Vec<f64>)> {
    params.validate()?;
    let p = params;
    let mut gain = p.initial_gain;
    let mut estimate: Option<f64> = None;
    let mut gains = Vec::with_capacity(frame.len());
    let out = frame
        .iter()
        .map(|s| {
            let level = s.norm().ln();
            if level >= p.low_level {
                let est = match estimate {
                    Some(e) => e + p.level_alpha * (level - e),
                    None => level,
                };
                estimate = Some(est);
                let error = p.reference_level - est - gain;
                let alpha = if level + gain > p.high_level {
                    p.overflow_alpha
                } else if error.abs() > p.track_range {
                    p.acquire_alpha
                } else {
                    p.track_alpha
                };
                gain += alpha * error;
            }
            gains.push(gain);
            s * gain.exp()
        })
        .collect();
    Ok((ComplexFrame::new(out), gains))
}

pub fn agc(frame: &ComplexFrame, params: &AgcParams) -> Result<ComplexFrame> {
    Ok(agc_trace(frame, params)?.0)
}
