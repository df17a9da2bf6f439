//! Signal statistics: Welch PSD, spectrogram, occupied bandwidth, Es/N0
//! bookkeeping and envelope constancy.

use serde::{Deserialize, Serialize};

use crate::dsp::{fft_in_place, hann_periodic};
use crate::error::{Error, Result};
use crate::frame::{mean_power, ComplexFrame, ComplexSample};

pub const DEFAULT_NFFT: usize = 256;
pub const DEFAULT_OVERLAP: f64 = 0.5;
/// Floor applied before taking logarithms, in linear power.
pub const POWER_FLOOR: f64 = 1e-20;

fn to_db(p: f64) -> f64 {
    10.0 * p.max(POWER_FLOOR).log10()
}

/// Averaged periodogram over `[-0.5, 0.5)`, bins in ascending frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsdEstimate {
    pub frequencies: Vec<f64>,
    /// Power spectral density per bin, dB re. unit power per cycle/sample.
    pub density_db: Vec<f64>,
    pub nfft: usize,
    pub overlap: f64,
    /// Linear density, same layout as `density_db`.
    #[serde(skip)]
    linear: Vec<f64>,
}

impl PsdEstimate {
    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    /// Integral of the density over frequency.
    pub fn total_power(&self) -> f64 {
        self.linear.iter().sum::<f64>() / self.nfft as f64
    }

    pub fn peak_bin(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.linear.iter().enumerate() {
            if p > self.linear[best] {
                best = i;
            }
        }
        best
    }

    pub fn peak_frequency(&self) -> f64 {
        self.frequencies[self.peak_bin()]
    }

    pub fn bin_of(&self, freq: f64) -> usize {
        let k = ((freq + 0.5) * self.nfft as f64).round() as i64;
        k.rem_euclid(self.nfft as i64) as usize
    }

    /// Median density in dB over bins with `low <= |f| <= high`.
    pub fn band_median_db(&self, low: f64, high: f64) -> Option<f64> {
        let mut vals: Vec<f64> = self
            .frequencies
            .iter()
            .zip(&self.density_db)
            .filter(|(f, _)| (low..=high).contains(&f.abs()))
            .map(|(_, &d)| d)
            .collect();
        if vals.is_empty() {
            return None;
        }
        vals.sort_by(f64::total_cmp);
        let n = vals.len();
        Some(if n % 2 == 1 {
            vals[n / 2]
        } else {
            0.5 * (vals[n / 2 - 1] + vals[n / 2])
        })
    }

    pub fn median_db(&self) -> f64 {
        self.band_median_db(0.0, 0.5).unwrap_or(f64::NEG_INFINITY)
    }
}

fn segment_spectrum(segment: &[ComplexSample], window: &[f64], buf: &mut Vec<ComplexSample>) {
    buf.clear();
    buf.extend(segment.iter().zip(window).map(|(x, w)| x * w));
    fft_in_place(buf);
}

/// Welch estimate with a periodic Hann window and `overlap` fraction of
/// segment overlap. Scaled so the integrated density equals mean power.
pub fn welch_psd(frame: &ComplexFrame, nfft: usize, overlap: f64) -> Result<PsdEstimate> {
    let x = frame.samples();
    if x.is_empty() {
        return Err(Error::EmptyFrame);
    }
    if nfft == 0 || nfft > x.len() {
        return Err(Error::invalid("nfft", format!("{nfft} must be in 1..={}", x.len())));
    }
    if !(0.0..1.0).contains(&overlap) {
        return Err(Error::invalid("overlap", format!("{overlap} not in [0, 1)")));
    }
    let hop = ((nfft as f64 * (1.0 - overlap)).round() as usize).max(1);
    let window = hann_periodic(nfft);
    let wpow: f64 = window.iter().map(|w| w * w).sum();
    let mut acc = vec![0.0; nfft];
    let mut buf = Vec::with_capacity(nfft);
    let mut segments = 0usize;
    let mut start = 0;
    while start + nfft <= x.len() {
        segment_spectrum(&x[start..start + nfft], &window, &mut buf);
        for (a, v) in acc.iter_mut().zip(&buf) {
            *a += v.norm_sqr();
        }
        segments += 1;
        start += hop;
    }
    let scale = 1.0 / (wpow * segments as f64);
    let half = nfft / 2;
    let mut linear = Vec::with_capacity(nfft);
    let mut frequencies = Vec::with_capacity(nfft);
    for i in 0..nfft {
        // Ascending frequency: bins half..nfft are negative.
        let k = (i + half + nfft % 2) % nfft;
        linear.push(acc[k] * scale);
        let signed = if k >= nfft.div_ceil(2) {
            k as f64 - nfft as f64
        } else {
            k as f64
        };
        frequencies.push(signed / nfft as f64);
    }
    let density_db = linear.iter().map(|&p| to_db(p)).collect();
    Ok(PsdEstimate {
        frequencies,
        density_db,
        nfft,
        overlap,
        linear,
    })
}

/// Short-time power spectrum in dB, `num_freqs` rows (ascending frequency)
/// by `num_frames` columns, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrogram {
    pub nfft: usize,
    pub hop: usize,
    pub num_freqs: usize,
    pub num_frames: usize,
    pub data: Vec<f64>,
}

impl Spectrogram {
    pub fn get(&self, freq_bin: usize, frame: usize) -> f64 {
        self.data[freq_bin * self.num_frames + frame]
    }

    pub fn row(&self, freq_bin: usize) -> &[f64] {
        &self.data[freq_bin * self.num_frames..(freq_bin + 1) * self.num_frames]
    }

    /// Frequency bin with the largest value in column `frame`.
    pub fn column_argmax(&self, frame: usize) -> usize {
        (0..self.num_freqs)
            .max_by(|&a, &b| self.get(a, frame).total_cmp(&self.get(b, frame)))
            .unwrap_or(0)
    }
}

/// Hann-windowed STFT magnitude in dB. `T = (len - nfft) / hop + 1`.
pub fn spectrogram(frame: &ComplexFrame, nfft: usize, hop: usize) -> Result<Spectrogram> {
    let x = frame.samples();
    if nfft == 0 || nfft > x.len() {
        return Err(Error::invalid("nfft", format!("{nfft} must be in 1..={}", x.len())));
    }
    if hop == 0 {
        return Err(Error::invalid("hop", "must be positive"));
    }
    let num_frames = (x.len() - nfft) / hop + 1;
    let window = hann_periodic(nfft);
    let wpow: f64 = window.iter().map(|w| w * w).sum();
    let mut data = vec![0.0; nfft * num_frames];
    let mut buf = Vec::with_capacity(nfft);
    let half = nfft / 2;
    for t in 0..num_frames {
        segment_spectrum(&x[t * hop..t * hop + nfft], &window, &mut buf);
        for i in 0..nfft {
            let k = (i + half + nfft % 2) % nfft;
            data[i * num_frames + t] = to_db(buf[k].norm_sqr() / wpow);
        }
    }
    Ok(Spectrogram {
        nfft,
        hop,
        num_freqs: nfft,
        num_frames,
        data,
    })
}

/// Width in cycles/sample of the band left after trimming `(1 - fraction)/2`
/// of the total power from each spectral tail.
pub fn occupied_bandwidth(psd: &PsdEstimate, fraction: f64) -> Result<f64> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::invalid("fraction", format!("{fraction} not in (0, 1]")));
    }
    if fraction >= 1.0 {
        return Ok(1.0);
    }
    let p = psd.linear();
    let total: f64 = p.iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroPower);
    }
    let tail = 0.5 * (1.0 - fraction) * total;
    let mut cum = 0.0;
    let mut lower = 0;
    for (i, &v) in p.iter().enumerate() {
        cum += v;
        if cum > tail {
            lower = i;
            break;
        }
    }
    cum = 0.0;
    let mut upper = p.len() - 1;
    for (i, &v) in p.iter().enumerate().rev() {
        cum += v;
        if cum > tail {
            upper = i;
            break;
        }
    }
    Ok((upper.max(lower) - lower + 1) as f64 / psd.nfft as f64)
}

/// `10 log10(P_signal * sps / P_noise)` from the clean frame and the exact
/// noise realization. Returns `+inf` for zero noise.
pub fn measure_esn0(clean: &[ComplexSample], noise: &[ComplexSample], samples_per_symbol: f64) -> Result<f64> {
    let ps = mean_power(clean)?;
    if noise.is_empty() {
        return Ok(f64::INFINITY);
    }
    let pn = mean_power(noise)?;
    if pn == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (ps * samples_per_symbol / pn).log10())
}

/// `max |(|x| - mean|x|)| / mean|x|`.
pub fn envelope_constancy(frame: &ComplexFrame) -> Result<f64> {
    if frame.is_empty() {
        return Err(Error::EmptyFrame);
    }
    let mags: Vec<f64> = frame.iter().map(|s| s.norm()).collect();
    let mean = mags.iter().sum::<f64>() / mags.len() as f64;
    if mean == 0.0 {
        return Err(Error::ZeroPower);
    }
    Ok(mags.iter().map(|m| (m - mean).abs()).fold(0.0, f64::max) / mean)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modulators::gen_clean;
    use crate::rng::RngStream;
    use std::f64::consts::TAU;

    fn tone(freq: f64, len: usize) -> ComplexFrame {
        ComplexFrame::new(
            (0..len)
                .map(|n| ComplexSample::from_polar(1.0, TAU * freq * n as f64))
                .collect(),
        )
    }

    fn white(len: usize, seed: u64) -> ComplexFrame {
        let mut rng = RngStream::new(seed);
        ComplexFrame::new(
            (0..len)
                .map(|_| {
                    let (a, b) = rng.normal_pair();
                    ComplexSample::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
                })
                .collect(),
        )
    }

    #[test]
    fn white_noise_is_flat() {
        let psd = welch_psd(&white(4096, 1), 256, 0.5).unwrap();
        let med = psd.median_db();
        let within = psd.density_db.iter().filter(|d| (*d - med).abs() <= 2.0).count();
        assert!(within as f64 >= 0.95 * 256.0, "{within}");
        assert!((psd.total_power() - 1.0).abs() < 0.05);
        // Averaging independent frames shrinks the estimator spread below the bound everywhere.
        let mut avg = vec![0.0; 256];
        for seed in 10..18 {
            for (a, p) in avg
                .iter_mut()
                .zip(welch_psd(&white(4096, seed), 256, 0.5).unwrap().linear())
            {
                *a += p / 8.0;
            }
        }
        assert!(avg.iter().all(|p| (10.0 * p.log10()).abs() <= 2.0));
        assert_eq!(psd.frequencies[0], -0.5);
        assert_eq!(psd.frequencies.len(), 256);
    }

    #[test]
    fn tone_peaks_at_its_bin() {
        let psd = welch_psd(&tone(0.125, 4096), 256, 0.5).unwrap();
        assert!((psd.peak_frequency() - 0.125).abs() < 1e-12);
        assert!(psd.density_db[psd.peak_bin()] - psd.median_db() > 20.0);
        assert!((psd.total_power() - 1.0).abs() < 0.05);
    }

    #[test]
    fn parseval_on_modulated_frames() {
        for class in [4, 22, 30, 47] {
            let (frame, _) = gen_clean(class, 4096, &mut RngStream::new(3)).unwrap();
            let p = welch_psd(&frame, 256, 0.5).unwrap().total_power();
            assert!((p - 1.0).abs() < 0.05, "class {class}: {p}");
        }
    }

    #[test]
    fn bandwidth_examples() {
        let psd = welch_psd(&white(4096, 2), 256, 0.5).unwrap();
        assert_eq!(occupied_bandwidth(&psd, 1.0).unwrap(), 1.0);
        let tone_psd = welch_psd(&tone(0.1, 4096), 256, 0.5).unwrap();
        assert!(occupied_bandwidth(&tone_psd, 0.9).unwrap() <= 3.0 / 256.0);
        let mut last = 0.0;
        for f in [0.1, 0.3, 0.5, 0.7, 0.9, 0.99] {
            let bw = occupied_bandwidth(&psd, f).unwrap();
            assert!(bw >= last);
            last = bw;
        }
    }

    #[test]
    fn spectrogram_dimensions_and_tone_row() {
        let s = spectrogram(&tone(-0.25, 4096), 128, 64).unwrap();
        assert_eq!(s.num_frames, (4096 - 128) / 64 + 1);
        assert_eq!(s.num_freqs, 128);
        let row = s.column_argmax(0);
        for t in 0..s.num_frames {
            assert_eq!(s.column_argmax(t), row);
        }
        assert_eq!(row, 32);
        let z = spectrogram(&ComplexFrame::zeros(512), 64, 32).unwrap();
        assert!(z.data.iter().all(|&v| v == z.data[0]));
    }

    #[test]
    fn esn0_arithmetic() {
        let clean = vec![ComplexSample::new(1.0, 0.0); 8];
        let noise = vec![ComplexSample::new(0.2f64.sqrt(), 0.0); 8];
        assert!((measure_esn0(&clean, &noise, 2.0).unwrap() - 10.0).abs() < 1e-12);
        assert_eq!(measure_esn0(&clean, &[], 2.0).unwrap(), f64::INFINITY);
        let zeros = vec![ComplexSample::new(0.0, 0.0); 8];
        assert_eq!(measure_esn0(&clean, &zeros, 2.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn envelope_examples() {
        let (fsk, _) = gen_clean(29, 4096, &mut RngStream::new(1)).unwrap();
        assert!(envelope_constancy(&fsk).unwrap() <= 1e-9);
        let (qam, _) = gen_clean(17, 4096, &mut RngStream::new(1)).unwrap();
        assert!(envelope_constancy(&qam).unwrap() > 0.1);
        assert!(envelope_constancy(&ComplexFrame::zeros(16)).is_err());
    }
}
