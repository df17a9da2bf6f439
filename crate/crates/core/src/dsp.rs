//! Filtering, transforms and resampling shared by the generators and
//! impairments.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlannerScalar};

thread_local! {
    // Scalar planner: identical results on every CPU, no SIMD dispatch.
    static PLANNER: RefCell<FftPlannerScalar<f64>> = RefCell::new(FftPlannerScalar::new());
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(len)
        } else {
            p.plan_fft_forward(len)
        }
    })
}

/// Unnormalized forward DFT, in place.
pub fn fft_in_place(buf: &mut [Complex64]) {
    if !buf.is_empty() {
        plan(buf.len(), false).process(buf);
    }
}

/// Inverse DFT scaled by `1/len`, in place.
pub fn ifft_in_place(buf: &mut [Complex64]) {
    if buf.is_empty() {
        return;
    }
    plan(buf.len(), true).process(buf);
    let scale = 1.0 / buf.len() as f64;
    buf.iter_mut().for_each(|v| *v *= scale);
}

pub fn fft(x: &[Complex64]) -> Vec<Complex64> {
    let mut buf = x.to_vec();
    fft_in_place(&mut buf);
    buf
}

/// Reorders a spectrum so that bin 0 holds frequency -0.5.
pub fn fftshift<T: Copy>(x: &[T]) -> Vec<T> {
    let half = x.len() / 2;
    x[half..].iter().chain(x[..half].iter()).copied().collect()
}

#[inline]
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = PI * x;
        px.sin() / px
    }
}

/// Symmetric Blackman window of length `n`.
pub fn blackman(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    let m = (n - 1) as f64;
    (0..n)
        .map(|i| {
            let x = 2.0 * PI * i as f64 / m;
            0.42 - 0.5 * x.cos() + 0.08 * (2.0 * x).cos()
        })
        .collect()
}

/// Periodic Hann window of length `n` (the usual spectral-analysis form).
pub fn hann_periodic(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos())
        .collect()
}

/// Blackman-windowed sinc low-pass with -6 dB point at `cutoff`
/// (cycles/sample) and unit DC gain. `num_taps` should be odd.
pub fn lowpass_taps(cutoff: f64, num_taps: usize) -> Vec<f64> {
    let window = blackman(num_taps);
    let center = (num_taps - 1) as f64 / 2.0;
    let mut taps: Vec<f64> = window
        .iter()
        .enumerate()
        .map(|(i, w)| 2.0 * cutoff * sinc(2.0 * cutoff * (i as f64 - center)) * w)
        .collect();
    let sum: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= sum);
    taps
}

/// Full linear convolution with real taps: output length `x.len() + h.len() - 1`.
pub fn convolve_full(x: &[Complex64], h: &[f64]) -> Vec<Complex64> {
    if x.is_empty() || h.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Complex64::new(0.0, 0.0); x.len() + h.len() - 1];
    for (i, &xi) in x.iter().enumerate() {
        if xi.re == 0.0 && xi.im == 0.0 {
            continue;
        }
        for (o, &hk) in out[i..].iter_mut().zip(h) {
            *o += xi * hk;
        }
    }
    out
}

/// Convolution with real taps, delay-compensated to the taps' center so the
/// output has the same length and alignment as `x`.
pub fn filter_same(x: &[Complex64], h: &[f64]) -> Vec<Complex64> {
    let full = convolve_full(x, h);
    let delay = (h.len() - 1) / 2;
    full[delay..delay + x.len()].to_vec()
}

/// Causal FIR with complex taps, truncated to `x.len()` outputs:
/// `y[n] = sum_k h[k] x[n - k]`.
pub fn filter_causal(x: &[Complex64], h: &[Complex64]) -> Vec<Complex64> {
    (0..x.len())
        .map(|n| h.iter().take(n + 1).enumerate().map(|(k, &hk)| hk * x[n - k]).sum())
        .collect()
}

/// Closest rational `p/q` to `rate` with `q <= max_den`, smallest `q` on ties.
pub fn rational_approx(rate: f64, max_den: u64) -> (u64, u64) {
    let mut best = (rate.round().max(1.0) as u64, 1u64);
    let mut best_err = f64::INFINITY;
    for q in 1..=max_den {
        let p = (rate * q as f64).round();
        if p < 1.0 {
            continue;
        }
        let err = (p / q as f64 - rate).abs();
        if err < best_err {
            best_err = err;
            best = (p as u64, q);
        }
    }
    best
}

/// Rational-rate resampler (`p` outputs per `q` inputs) built from a
/// Blackman-windowed sinc kernel evaluated per polyphase branch.
#[derive(Debug, Clone)]
pub struct Resampler {
    up: u64,
    down: u64,
    half_width: usize,
    /// `phases[r][j]` weights input `base - half_width + 1 + j` for output
    /// phase `r`.
    phases: Vec<Vec<f64>>,
}

/// Kernel zero crossings on each side of center.
const RESAMPLER_ZERO_CROSSINGS: f64 = 16.0;

impl Resampler {
    pub fn new(up: u64, down: u64) -> Self {
        assert!(up > 0 && down > 0);
        let rate = up as f64 / down as f64;
        // Anti-alias when decimating, anti-image when interpolating.
        let cutoff = 0.5 * rate.min(1.0);
        let support = RESAMPLER_ZERO_CROSSINGS / (2.0 * cutoff);
        let half_width = support.ceil() as usize;
        let phases = (0..up)
            .map(|r| {
                let frac = r as f64 / up as f64;
                (0..2 * half_width)
                    .map(|j| {
                        let offset = j as f64 - half_width as f64 + 1.0;
                        let tau = frac - offset;
                        if tau.abs() >= support {
                            return 0.0;
                        }
                        let w = 0.42 + 0.5 * (PI * tau / support).cos() + 0.08 * (2.0 * PI * tau / support).cos();
                        2.0 * cutoff * sinc(2.0 * cutoff * tau) * w
                    })
                    .collect()
            })
            .collect();
        Resampler {
            up,
            down,
            half_width,
            phases,
        }
    }

    pub fn rate(&self) -> f64 {
        self.up as f64 / self.down as f64
    }

    pub fn output_len(&self, input_len: usize) -> usize {
        ((input_len as u64 * self.up) / self.down) as usize
    }

    pub fn process(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n_out = self.output_len(x.len());
        let n_in = x.len() as i64;
        let hw = self.half_width as i64;
        (0..n_out as u64)
            .map(|m| {
                let pos = m * self.down;
                let base = (pos / self.up) as i64;
                let phase = &self.phases[(pos % self.up) as usize];
                let first = base - hw + 1;
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, &w) in phase.iter().enumerate() {
                    let idx = first + j as i64;
                    if idx >= 0 && idx < n_in {
                        acc += x[idx as usize] * w;
                    }
                }
                acc
            })
            .collect()
    }
}
