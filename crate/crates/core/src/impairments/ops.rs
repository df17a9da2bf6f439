//! Individual channel and front-end impairments.

use std::f64::consts::{FRAC_PI_2, TAU};

use crate::dsp::{filter_causal, rational_approx, Resampler};
use crate::error::{Error, Result};
use crate::frame::{power_of, ComplexFrame, ComplexSample};
use crate::rng::RngStream;

/// Largest denominator used when approximating a resampling rate.
pub const RESAMPLE_MAX_DENOMINATOR: u64 = 1024;
pub const RAYLEIGH_MAX_TAPS: usize = 20;

pub fn phase_shift(frame: &ComplexFrame, phi: f64) -> Result<ComplexFrame> {
    if !phi.is_finite() {
        return Err(Error::invalid("phi", "must be finite"));
    }
    let rot = unit_phasor(phi);
    Ok(frame.map(|s| s * rot))
}

/// `exp(j phi)`, exact at integer multiples of pi/2.
pub fn unit_phasor(phi: f64) -> ComplexSample {
    let quarters = phi / FRAC_PI_2;
    if quarters == quarters.round() && (quarters.round() * FRAC_PI_2 == phi) {
        return match (quarters.round() as i64).rem_euclid(4) {
            0 => ComplexSample::new(1.0, 0.0),
            1 => ComplexSample::new(0.0, 1.0),
            2 => ComplexSample::new(-1.0, 0.0),
            _ => ComplexSample::new(0.0, -1.0),
        };
    }
    ComplexSample::from_polar(1.0, phi)
}

/// Delays (positive `shift`) or advances the frame; vacated samples are zero.
pub fn time_shift(frame: &ComplexFrame, shift: i64) -> Result<ComplexFrame> {
    let len = frame.len() as i64;
    if shift.abs() >= len {
        return Err(Error::invalid("shift", format!("|{shift}| must be below {len}")));
    }
    let src = frame.samples();
    let zero = ComplexSample::new(0.0, 0.0);
    let out = (0..len)
        .map(|n| {
            let from = n - shift;
            if (0..len).contains(&from) {
                src[from as usize]
            } else {
                zero
            }
        })
        .collect();
    Ok(ComplexFrame::new(out))
}

/// Mixes with `exp(j 2 pi f n)`.
pub fn freq_shift(frame: &ComplexFrame, freq: f64) -> Result<ComplexFrame> {
    if freq.is_nan() || freq.abs() >= 0.5 {
        return Err(Error::invalid("freq", format!("|{freq}| must be below 0.5")));
    }
    let out = frame
        .iter()
        .enumerate()
        .map(|(n, s)| {
            // Reduce the cycle count before scaling to keep the phase exact.
            let cycles = (freq * n as f64).fract();
            s * ComplexSample::from_polar(1.0, TAU * cycles)
        })
        .collect();
    Ok(ComplexFrame::new(out))
}

/// Rayleigh FIR taps with a linearly tapering power-delay profile
/// `p_k ∝ 1 - k/n`, normalized to unit expected energy.
pub(crate) fn fading_taps(num_taps: usize, rng: &mut RngStream) -> Vec<ComplexSample> {
    let profile: Vec<f64> = (0..num_taps).map(|k| 1.0 - k as f64 / num_taps as f64).collect();
    let total: f64 = profile.iter().sum();
    profile
        .iter()
        .map(|p| {
            let (g1, g2) = rng.normal_pair();
            ComplexSample::new(g1, g2) * (p / total / 2.0).sqrt()
        })
        .collect()
}

pub(crate) fn apply_channel(frame: &ComplexFrame, taps: &[ComplexSample]) -> ComplexFrame {
    ComplexFrame::new(filter_causal(frame.samples(), taps))
}

/// Frequency-selective static Rayleigh channel. Returns the impaired frame
/// and the drawn taps.
pub fn rayleigh_channel(
    frame: &ComplexFrame,
    num_taps: usize,
    rng: &mut RngStream,
) -> Result<(ComplexFrame, Vec<ComplexSample>)> {
    if !(2..=RAYLEIGH_MAX_TAPS).contains(&num_taps) {
        return Err(Error::invalid("num_taps", format!("{num_taps} not in 2..=20")));
    }
    let taps = fading_taps(num_taps, rng);
    Ok((apply_channel(frame, &taps), taps))
}

/// Receiver IQ imbalance:
/// 1. `I' = 10^(a/40) Re x`, `Q' = 10^(-a/40) Im x`
/// 2. `y = cos(φ/2) x' + j sin(φ/2) conj(x')`
/// 3. `y += dc` on the real axis.
pub fn iq_imbalance(frame: &ComplexFrame, amp_db: f64, phase_rad: f64, dc_offset: f64) -> ComplexFrame {
    let gi = 10f64.powf(amp_db / 40.0);
    let gq = 10f64.powf(-amp_db / 40.0);
    let (s, c) = (phase_rad / 2.0).sin_cos();
    let j_sin = ComplexSample::new(0.0, s);
    frame.map(|x| {
        let xp = ComplexSample::new(gi * x.re, gq * x.im);
        xp * c + j_sin * xp.conj() + dc_offset
    })
}

/// Resamples by `rate` output samples per input sample, then zero-pads or
/// truncates back to the input length. `rate == 1` is an exact identity.
pub fn random_resample(frame: &ComplexFrame, rate: f64) -> Result<ComplexFrame> {
    if !(0.75..=1.5).contains(&rate) {
        return Err(Error::invalid("rate", format!("{rate} not in [0.75, 1.5]")));
    }
    if rate == 1.0 {
        return Ok(frame.clone());
    }
    let (up, down) = rational_approx(rate, RESAMPLE_MAX_DENOMINATOR);
    Ok(resample_ratio(frame, up, down))
}

pub(crate) fn resample_ratio(frame: &ComplexFrame, up: u64, down: u64) -> ComplexFrame {
    if up == down {
        return frame.clone();
    }
    let out = Resampler::new(up, down).process(frame.samples());
    ComplexFrame::new(out).fit_to_len(frame.len())
}

/// Circular complex Gaussian noise of exactly `power` mean power.
pub(crate) fn noise_vector(len: usize, power: f64, key: u64) -> Vec<ComplexSample> {
    let mut rng = RngStream::new(key);
    let mut noise: Vec<ComplexSample> = (0..len)
        .map(|_| {
            let (a, b) = rng.normal_pair();
            ComplexSample::new(a, b)
        })
        .collect();
    let drawn = power_of(&noise);
    if drawn > 0.0 {
        let scale = (power / drawn).sqrt();
        noise.iter_mut().for_each(|v| *v *= scale);
    }
    noise
}

/// Per-sample noise variance giving `esn0_db` for a unit-power signal at
/// `sps` samples per symbol.
pub fn noise_power_for(esn0_db: f64, samples_per_symbol: f64) -> f64 {
    samples_per_symbol * 10f64.powf(-esn0_db / 10.0)
}

/// Adds AWGN so a unit-power frame sits at `esn0_db` Es/N0. The realization
/// is scaled to exactly the target variance. Returns the noisy frame and the
/// injected noise power.
pub fn add_awgn(
    frame: &ComplexFrame,
    esn0_db: f64,
    samples_per_symbol: f64,
    rng: &mut RngStream,
) -> Result<(ComplexFrame, f64)> {
    if samples_per_symbol.is_nan() || samples_per_symbol <= 0.0 {
        return Err(Error::invalid("samples_per_symbol", "must be positive"));
    }
    if esn0_db == f64::INFINITY {
        return Ok((frame.clone(), 0.0));
    }
    let power = noise_power_for(esn0_db, samples_per_symbol);
    let noise = noise_vector(frame.len(), power, rng.next_u64());
    let out = frame.iter().zip(&noise).map(|(s, n)| s + n).collect();
    Ok((ComplexFrame::new(out), power))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::fft;
    use std::f64::consts::PI;

    fn tone(freq: f64, len: usize) -> ComplexFrame {
        ComplexFrame::new(
            (0..len)
                .map(|n| ComplexSample::from_polar(1.0, TAU * freq * n as f64))
                .collect(),
        )
    }

    fn peak_bin(frame: &ComplexFrame) -> i64 {
        let spec = fft(frame.samples());
        spec.iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
            .unwrap()
            .0 as i64
    }

    fn noise_frame(seed: u64, len: usize) -> ComplexFrame {
        ComplexFrame::new(noise_vector(len, 1.0, seed))
    }

    #[test]
    fn phase_shift_examples() {
        let f = noise_frame(1, 64);
        assert_eq!(phase_shift(&f, 0.0).unwrap(), f);
        let neg = phase_shift(&f, PI).unwrap();
        for (a, b) in f.iter().zip(neg.iter()) {
            assert!((a + b).norm() < 1e-15);
        }
        let one = ComplexFrame::new(vec![ComplexSample::new(1.0, 0.0)]);
        let rot = phase_shift(&one, PI / 2.0).unwrap();
        assert!((rot[0] - ComplexSample::new(0.0, 1.0)).norm() < 1e-15);
        let p0 = f.mean_power().unwrap();
        assert!((phase_shift(&f, 1.234).unwrap().mean_power().unwrap() - p0).abs() < 1e-12 * p0);
        assert!(phase_shift(&f, f64::NAN).is_err());
    }

    #[test]
    fn time_shift_examples() {
        let f = noise_frame(2, 256);
        assert_eq!(time_shift(&f, 0).unwrap(), f);
        let d = time_shift(&f, 32).unwrap();
        assert!(d.samples()[..32].iter().all(|s| s.norm() == 0.0));
        assert_eq!(&d.samples()[32..], &f.samples()[..224]);
        let back = time_shift(&d, -32).unwrap();
        assert_eq!(&back.samples()[..224], &f.samples()[..224]);
        assert!(back.samples()[224..].iter().all(|s| s.norm() == 0.0));
        assert!(time_shift(&f, 256).is_err());
    }

    #[test]
    fn freq_shift_examples() {
        let n = 4096;
        let f = noise_frame(3, n);
        assert_eq!(freq_shift(&f, 0.0).unwrap(), f);
        let shifted = freq_shift(&tone(0.10, n), 0.05).unwrap();
        assert!((peak_bin(&shifted) - (0.15 * n as f64).round() as i64).abs() <= 1);
        let round = freq_shift(&freq_shift(&f, 0.123).unwrap(), -0.123).unwrap();
        for (a, b) in f.iter().zip(round.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
        let p0 = f.mean_power().unwrap();
        assert!((freq_shift(&f, 0.3).unwrap().mean_power().unwrap() - p0).abs() < 1e-12 * p0);
        assert!(freq_shift(&f, 0.5).is_err());
    }

    #[test]
    fn single_tap_channel_is_complex_scaling() {
        let f = noise_frame(4, 128);
        let mut rng = RngStream::new(5);
        let taps = fading_taps(1, &mut rng);
        let out = apply_channel(&f, &taps);
        for (a, b) in f.iter().zip(out.iter()) {
            assert!((a * taps[0] - b).norm() < 1e-15);
        }
    }

    #[test]
    fn rayleigh_power_is_preserved_on_average() {
        let f = noise_frame(6, 4096);
        let mut rng = RngStream::new(7);
        let runs = 1000;
        let mut total = 0.0;
        for _ in 0..runs {
            let n = rng.int_inclusive(2, 20) as usize;
            let (out, taps) = rayleigh_channel(&f, n, &mut rng).unwrap();
            assert_eq!(taps.len(), n);
            total += out.mean_power().unwrap();
        }
        let mean = total / runs as f64;
        assert!((mean - 1.0).abs() < 0.1, "mean power {mean}");
        assert!(rayleigh_channel(&f, 1, &mut rng).is_err());
        assert!(rayleigh_channel(&f, 21, &mut rng).is_err());
    }

    #[test]
    fn iq_imbalance_examples() {
        let f = noise_frame(8, 64);
        let same = iq_imbalance(&f, 0.0, 0.0, 0.0);
        for (a, b) in f.iter().zip(same.iter()) {
            assert!((a - b).norm() < 1e-15);
        }
        let shifted = iq_imbalance(&f, 0.0, 0.0, 0.1);
        let centroid = |fr: &ComplexFrame| fr.iter().sum::<ComplexSample>() / fr.len() as f64;
        let d = centroid(&shifted) - centroid(&f);
        assert!((d - ComplexSample::new(0.1, 0.0)).norm() < 1e-12);
        let one = ComplexFrame::new(vec![ComplexSample::new(1.0, 1.0)]);
        let out = iq_imbalance(&one, 3.0, 0.0, 0.0);
        assert!((out[0].re - 10f64.powf(3.0 / 40.0)).abs() < 1e-15);
        assert!((out[0].im - 10f64.powf(-3.0 / 40.0)).abs() < 1e-15);
    }

    #[test]
    fn resample_examples() {
        let n = 4096;
        let f = tone(0.10, n);
        assert_eq!(random_resample(&f, 1.0).unwrap(), f);
        let up = random_resample(&f, 1.25).unwrap();
        assert_eq!(up.len(), n);
        assert!((peak_bin(&up) - (0.08 * n as f64).round() as i64).abs() <= 1);
        let down = random_resample(&f, 0.75).unwrap();
        assert_eq!(down.len(), n);
        assert!(down.samples()[3072..].iter().all(|s| s.norm() == 0.0));
        assert!(down.samples()[3000].norm() > 0.5);
        assert!(random_resample(&f, 2.0).is_err());
    }

    #[test]
    fn awgn_calibration() {
        let f = tone(0.01, 4096);
        let mut rng = RngStream::new(11);
        let (same, p) = add_awgn(&f, f64::INFINITY, 2.0, &mut rng).unwrap();
        assert_eq!((same, p), (f.clone(), 0.0));

        let (noisy, p) = add_awgn(&f, 10.0, 2.0, &mut rng).unwrap();
        let injected: Vec<ComplexSample> = noisy.iter().zip(f.iter()).map(|(a, b)| a - b).collect();
        let measured = power_of(&injected);
        assert!((p - 0.2).abs() < 1e-15);
        assert!((measured - 0.2).abs() < 0.2 * 0.02);

        let (noisy, _) = add_awgn(&f, 0.0, 2.0, &mut rng).unwrap();
        let injected: Vec<ComplexSample> = noisy.iter().zip(f.iter()).map(|(a, b)| a - b).collect();
        let snr_db = 10.0 * (1.0 / power_of(&injected)).log10();
        assert!((snr_db + 3.0103).abs() < 0.2, "{snr_db}");
        assert!(add_awgn(&f, 10.0, 0.0, &mut rng).is_err());
    }
}
