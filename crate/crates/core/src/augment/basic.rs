//! Training-time transforms of the signals RandAugment set.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{ComplexFrame, ComplexSample};
use crate::rng::RngStream;

const ZERO: ComplexSample = ComplexSample::new(0.0, 0.0);

/// Reverses sample order. Reversal maps `f` to `-f`; with `undo_inversion`
/// the result is conjugated so the spectrum keeps its orientation.
pub fn time_reversal(frame: &ComplexFrame, undo_inversion: bool) -> ComplexFrame {
    let mut out: Vec<ComplexSample> = frame.iter().rev().copied().collect();
    if undo_inversion {
        out.iter_mut().for_each(|s| *s = s.conj());
    }
    ComplexFrame::new(out)
}

pub fn spectral_inversion(frame: &ComplexFrame) -> ComplexFrame {
    frame.map(|s| s.conj())
}

/// Swaps I and Q, i.e. `j * conj(x)`.
pub fn channel_swap(frame: &ComplexFrame) -> ComplexFrame {
    frame.map(|s| ComplexSample::new(s.im, s.re))
}

pub fn amplitude_reversal(frame: &ComplexFrame) -> ComplexFrame {
    frame.map(|s| -s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DropFill {
    Front,
    Back,
    Mean,
    Zero,
}

impl DropFill {
    pub const ALL: [DropFill; 4] = [DropFill::Front, DropFill::Back, DropFill::Mean, DropFill::Zero];
}

/// Replaces the half-open `regions` per `fill`. Front fill takes the last
/// kept sample before a region, back fill the next kept sample after it;
/// either falls back to the other side at the frame edges, then to zero.
pub fn fill_regions(frame: &ComplexFrame, regions: &[(usize, usize)], fill: DropFill) -> Result<ComplexFrame> {
    let len = frame.len();
    let mut dropped = vec![false; len];
    for &(start, end) in regions {
        if start > end || end > len {
            return Err(Error::invalid("regions", format!("[{start}, {end}) outside 0..{len}")));
        }
        dropped[start..end].iter_mut().for_each(|d| *d = true);
    }
    let src = frame.samples();
    let mut out = src.to_vec();
    match fill {
        DropFill::Zero => {
            for (o, &d) in out.iter_mut().zip(&dropped) {
                if d {
                    *o = ZERO;
                }
            }
        }
        DropFill::Mean => {
            let mean = src.iter().sum::<ComplexSample>() / len.max(1) as f64;
            for (o, &d) in out.iter_mut().zip(&dropped) {
                if d {
                    *o = mean;
                }
            }
        }
        DropFill::Front | DropFill::Back => {
            let mut before = vec![None; len];
            let mut last = None;
            for n in 0..len {
                if dropped[n] {
                    before[n] = last;
                } else {
                    last = Some(src[n]);
                }
            }
            let mut after = vec![None; len];
            let mut next = None;
            for n in (0..len).rev() {
                if dropped[n] {
                    after[n] = next;
                } else {
                    next = Some(src[n]);
                }
            }
            for n in (0..len).filter(|&n| dropped[n]) {
                let (first, second) = if fill == DropFill::Front {
                    (before[n], after[n])
                } else {
                    (after[n], before[n])
                };
                out[n] = first.or(second).unwrap_or(ZERO);
            }
        }
    }
    Ok(ComplexFrame::new(out))
}

/// Drops about `drop_rate * len` samples in disjoint regions whose lengths
/// are uniform in `region_len`, placed at random, and fills them.
pub fn drop_samples(
    frame: &ComplexFrame,
    rng: &mut RngStream,
    drop_rate: f64,
    region_len: (usize, usize),
    fill: DropFill,
) -> Result<ComplexFrame> {
    if !(0.0..=1.0).contains(&drop_rate) {
        return Err(Error::invalid("drop_rate", format!("{drop_rate} not in [0, 1]")));
    }
    if region_len.0 == 0 || region_len.0 > region_len.1 {
        return Err(Error::invalid("region_len", "need 1 <= low <= high"));
    }
    let len = frame.len();
    let target = (drop_rate * len as f64).round() as usize;
    let mut lengths = Vec::new();
    let mut total = 0;
    while total < target {
        let l = rng.int_inclusive(region_len.0 as i64, region_len.1 as i64) as usize;
        let l = l.min(target - total).max(1);
        if total + l > len {
            break;
        }
        lengths.push(l);
        total += l;
    }
    if lengths.is_empty() {
        return Ok(frame.clone());
    }
    // Spread the free samples into len(lengths) + 1 random gaps.
    let free = len - total;
    let mut cuts: Vec<usize> = (0..lengths.len()).map(|_| rng.index(free + 1)).collect();
    cuts.sort_unstable();
    let mut regions = Vec::with_capacity(lengths.len());
    let mut pos = 0;
    let mut prev_cut = 0;
    for (l, cut) in lengths.iter().zip(&cuts) {
        pos += cut - prev_cut;
        prev_cut = *cut;
        regions.push((pos, pos + l));
        pos += l;
    }
    fill_regions(frame, &regions, fill)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rounding {
    Floor,
    Middle,
    Ceiling,
}

impl Rounding {
    pub const ALL: [Rounding; 3] = [Rounding::Floor, Rounding::Middle, Rounding::Ceiling];
}

/// Uniform quantizer with `num_levels` cells over `[-m, m]`, `m` the
/// largest absolute component. A component in cell `k` maps to the cell's
/// lower edge, centre or upper edge.
pub fn quantize(frame: &ComplexFrame, num_levels: usize, rounding: Rounding) -> Result<ComplexFrame> {
    let m = frame.iter().fold(0.0f64, |m, s| m.max(s.re.abs()).max(s.im.abs()));
    quantize_in_range(frame, num_levels, rounding, m)
}

/// [`quantize`] over an explicit full-scale range `[-m, m]`.
pub fn quantize_in_range(frame: &ComplexFrame, num_levels: usize, rounding: Rounding, m: f64) -> Result<ComplexFrame> {
    if num_levels < 2 {
        return Err(Error::invalid("num_levels", "need at least 2 levels"));
    }
    if !(m >= 0.0 && m.is_finite()) {
        return Err(Error::invalid("m", "full scale must be finite and non-negative"));
    }
    if m == 0.0 {
        return Ok(frame.clone());
    }
    let step = 2.0 * m / num_levels as f64;
    let offset = match rounding {
        Rounding::Floor => 0.0,
        Rounding::Middle => 0.5,
        Rounding::Ceiling => 1.0,
    };
    let q = |v: f64| {
        let k = ((v + m) / step).floor().clamp(0.0, (num_levels - 1) as f64);
        -m + (k + offset) * step
    };
    Ok(frame.map(|s| ComplexSample::new(q(s.re), q(s.im))))
}

/// Scales samples from `start` to the end by `scale`.
pub fn magnitude_rescale(frame: &ComplexFrame, start: usize, scale: f64) -> Result<ComplexFrame> {
    if start > frame.len() {
        return Err(Error::invalid(
            "start",
            format!("{start} beyond frame length {}", frame.len()),
        ));
    }
    let mut out = frame.samples().to_vec();
    out[start..].iter_mut().for_each(|s| *s *= scale);
    Ok(ComplexFrame::new(out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoutFill {
    Zeros,
    Ones,
    LowNoise,
    AvgNoise,
    HighNoise,
}

impl CutoutFill {
    pub const ALL: [CutoutFill; 5] = [
        CutoutFill::Zeros,
        CutoutFill::Ones,
        CutoutFill::LowNoise,
        CutoutFill::AvgNoise,
        CutoutFill::HighNoise,
    ];

    /// Noise power relative to the frame's mean power.
    pub fn noise_scale(self) -> Option<f64> {
        match self {
            CutoutFill::LowNoise => Some(0.01),
            CutoutFill::AvgNoise => Some(1.0),
            CutoutFill::HighNoise => Some(100.0),
            _ => None,
        }
    }
}

/// Replaces one random contiguous region of `duration_frac * len` samples.
pub fn cutout(frame: &ComplexFrame, rng: &mut RngStream, duration_frac: f64, fill: CutoutFill) -> Result<ComplexFrame> {
    if !(0.0..=1.0).contains(&duration_frac) {
        return Err(Error::invalid(
            "duration_frac",
            format!("{duration_frac} not in [0, 1]"),
        ));
    }
    let len = frame.len();
    let dur = (duration_frac * len as f64).round() as usize;
    if dur == 0 {
        return Ok(frame.clone());
    }
    let start = rng.index(len - dur + 1);
    let power = frame.mean_power()?;
    let mut out = frame.samples().to_vec();
    for s in &mut out[start..start + dur] {
        *s = match fill {
            CutoutFill::Zeros => ZERO,
            CutoutFill::Ones => ComplexSample::new(1.0, 0.0),
            _ => {
                let sigma = (fill.noise_scale().unwrap_or(1.0) * power / 2.0).sqrt();
                let (a, b) = rng.normal_pair();
                ComplexSample::new(a, b) * sigma
            }
        };
    }
    Ok(ComplexFrame::new(out))
}

/// Splits the frame into consecutive patches with lengths uniform in
/// `patch_len`, and permutes the samples inside `round(shuffle_ratio * n)`
/// randomly chosen patches.
pub fn patch_shuffle(
    frame: &ComplexFrame,
    rng: &mut RngStream,
    patch_len: (usize, usize),
    shuffle_ratio: f64,
) -> Result<ComplexFrame> {
    if patch_len.0 == 0 || patch_len.0 > patch_len.1 {
        return Err(Error::invalid("patch_len", "need 1 <= low <= high"));
    }
    if !(0.0..=1.0).contains(&shuffle_ratio) {
        return Err(Error::invalid(
            "shuffle_ratio",
            format!("{shuffle_ratio} not in [0, 1]"),
        ));
    }
    let len = frame.len();
    let mut patches = Vec::new();
    let mut pos = 0;
    while pos < len {
        let l = rng.int_inclusive(patch_len.0 as i64, patch_len.1 as i64) as usize;
        let end = (pos + l).min(len);
        patches.push((pos, end));
        pos = end;
    }
    let count = (shuffle_ratio * patches.len() as f64).round() as usize;
    let mut order: Vec<usize> = (0..patches.len()).collect();
    rng.shuffle(&mut order);
    let mut out = frame.samples().to_vec();
    for &p in &order[..count] {
        let (a, b) = patches[p];
        rng.shuffle(&mut out[a..b]);
    }
    Ok(ComplexFrame::new(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::fft;
    use crate::impairments::phase_shift;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    fn tone(freq: f64, len: usize) -> ComplexFrame {
        ComplexFrame::new(
            (0..len)
                .map(|n| ComplexSample::from_polar(1.0, TAU * freq * n as f64))
                .collect(),
        )
    }

    fn peak(frame: &ComplexFrame) -> f64 {
        let spec = fft(frame.samples());
        let k = (0..spec.len())
            .max_by(|&a, &b| spec[a].norm().total_cmp(&spec[b].norm()))
            .unwrap();
        let n = spec.len() as f64;
        let k = k as f64;
        if k >= n / 2.0 {
            k / n - 1.0
        } else {
            k / n
        }
    }

    fn noise(seed: u64, len: usize) -> ComplexFrame {
        let mut rng = RngStream::new(seed);
        ComplexFrame::new(
            (0..len)
                .map(|_| {
                    let (a, b) = rng.normal_pair();
                    ComplexSample::new(a, b)
                })
                .collect(),
        )
    }

    #[test]
    fn reversal_moves_tone() {
        let t = tone(0.1, 1000);
        assert!((peak(&time_reversal(&t, false)) + 0.1).abs() < 1e-9);
        assert!((peak(&time_reversal(&t, true)) - 0.1).abs() < 1e-9);
        assert!((peak(&spectral_inversion(&t)) + 0.1).abs() < 1e-9);
        for undo in [false, true] {
            assert_eq!(time_reversal(&time_reversal(&t, undo), undo), t);
        }
    }

    #[test]
    fn simple_algebra() {
        let x = ComplexFrame::new(vec![ComplexSample::new(3.0, 4.0)]);
        assert_eq!(channel_swap(&x).samples()[0], ComplexSample::new(4.0, 3.0));
        let real = ComplexFrame::new(vec![ComplexSample::new(1.5, 0.0), ComplexSample::new(-2.0, 0.0)]);
        assert_eq!(spectral_inversion(&real), real);
        let f = noise(1, 512);
        assert_eq!(
            channel_swap(&f),
            phase_shift(&spectral_inversion(&f), FRAC_PI_2).unwrap()
        );
        let rev = amplitude_reversal(&f);
        let rot = phase_shift(&f, PI).unwrap();
        assert!(rev.iter().zip(rot.iter()).all(|(a, b)| (a - b).norm() <= 1e-15));
        assert_eq!(rev.mean_power().unwrap(), f.mean_power().unwrap());
    }

    #[test]
    fn drop_examples() {
        let f = noise(2, 64);
        assert_eq!(
            drop_samples(&f, &mut RngStream::new(1), 0.0, (1, 8), DropFill::Zero).unwrap(),
            f
        );
        let z = fill_regions(&f, &[(10, 20)], DropFill::Zero).unwrap();
        assert!(z.samples()[10..20].iter().all(|s| *s == ZERO));
        assert_eq!(z.samples()[9], f.samples()[9]);
        assert_eq!(z.samples()[20], f.samples()[20]);
        let fr = fill_regions(&f, &[(10, 20)], DropFill::Front).unwrap();
        assert!(fr.samples()[10..20].iter().all(|s| *s == f.samples()[9]));
        let bk = fill_regions(&f, &[(10, 20)], DropFill::Back).unwrap();
        assert!(bk.samples()[10..20].iter().all(|s| *s == f.samples()[20]));
        let mean = f.iter().sum::<ComplexSample>() / 64.0;
        let mn = fill_regions(&f, &[(0, 4)], DropFill::Mean).unwrap();
        assert!(mn.samples()[..4].iter().all(|s| *s == mean));
    }

    #[test]
    fn drop_rate_is_respected() {
        let f = ComplexFrame::new(vec![ComplexSample::new(1.0, 1.0); 4096]);
        let out = drop_samples(&f, &mut RngStream::new(3), 0.05, (4, 16), DropFill::Zero).unwrap();
        let zeros = out.iter().filter(|s| **s == ZERO).count();
        assert_eq!(zeros, (0.05f64 * 4096.0).round() as usize);
    }

    #[test]
    fn quantize_examples() {
        let x = ComplexFrame::new(vec![ComplexSample::new(0.3, -1.0), ComplexSample::new(1.0, 0.0)]);
        let q = quantize(&x, 2, Rounding::Floor).unwrap();
        assert_eq!(q.samples()[0].re, 0.0);
        let f = noise(4, 1000);
        for r in Rounding::ALL {
            let q = quantize(&f, 8, r).unwrap();
            let mut vals: Vec<f64> = q.iter().map(|s| s.re).collect();
            vals.sort_by(f64::total_cmp);
            vals.dedup();
            assert!(vals.len() <= 8);
        }
        // Cell centres of an explicit full scale are fixed points.
        let m = 2.0;
        let centres: Vec<f64> = (0..4).map(|k| -m + (k as f64 + 0.5) * m / 2.0).collect();
        let grid = ComplexFrame::new(centres.iter().map(|&c| ComplexSample::new(c, -c)).collect());
        assert_eq!(quantize_in_range(&grid, 4, Rounding::Middle, m).unwrap(), grid);
    }

    #[test]
    fn rescale_examples() {
        let f = noise(5, 256);
        assert_eq!(magnitude_rescale(&f, 17, 1.0).unwrap(), f);
        let p = magnitude_rescale(&f, 0, 2.0).unwrap().mean_power().unwrap();
        assert!((p / f.mean_power().unwrap() - 4.0).abs() < 1e-12);
        let r = magnitude_rescale(&f, 100, 3.0).unwrap();
        assert_eq!(r.samples()[99], f.samples()[99]);
        assert_eq!(r.samples()[100], f.samples()[100] * 3.0);
    }

    #[test]
    fn cutout_examples() {
        let f = noise(6, 4096);
        assert_eq!(
            cutout(&f, &mut RngStream::new(1), 0.0, CutoutFill::HighNoise).unwrap(),
            f
        );
        let z = cutout(&f, &mut RngStream::new(1), 0.25, CutoutFill::Zeros).unwrap();
        assert_eq!(z.iter().filter(|s| **s == ZERO).count(), 1024);
        let a = cutout(&f, &mut RngStream::new(2), 0.25, CutoutFill::AvgNoise).unwrap();
        let changed: Vec<_> = a
            .iter()
            .zip(f.iter())
            .filter(|(x, y)| x != y)
            .map(|(x, _)| *x)
            .collect();
        let p = crate::frame::power_of(&changed);
        let fp = f.mean_power().unwrap();
        assert!((p / fp - 1.0).abs() < 0.3, "{p} vs {fp}");
    }

    #[test]
    fn patch_shuffle_examples() {
        let f = noise(7, 1000);
        assert_eq!(patch_shuffle(&f, &mut RngStream::new(1), (3, 10), 0.0).unwrap(), f);
        let s = patch_shuffle(&f, &mut RngStream::new(1), (3, 10), 0.5).unwrap();
        let key = |v: &ComplexSample| (v.re.to_bits(), v.im.to_bits());
        let mut a: Vec<_> = f.iter().map(key).collect();
        let mut b: Vec<_> = s.iter().map(key).collect();
        a.sort_unstable();
        b.sort_unstable();
        assert_eq!(a, b);
        assert_ne!(s, f);
    }
}
