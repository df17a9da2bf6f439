//! Expert feature representations. Features are terminal: no transform
//! operates on them.

use serde::{Deserialize, Serialize};

use crate::dsp::fft;
use crate::error::Result;
use crate::frame::{ComplexFrame, ComplexSample};
use crate::measure::spectrogram;

pub const FEATURE_SPECTROGRAM_NFFT: usize = 256;
pub const FEATURE_SPECTROGRAM_HOP: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    /// `[2, len]`: real row then imaginary row.
    Iq2Channel,
    /// `[2 len]`: re, im, re, im, ...
    Interleaved,
    Magnitude,
    /// `atan2(im, re)` in `(-pi, pi]`.
    WrappedPhase,
    /// `[2, len]` real and imaginary parts of the unnormalized DFT.
    Dft,
    /// `[F, T]` log-power STFT with a 256-point Hann window, hop 128.
    Spectrogram,
}

/// Row-major real tensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Features {
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
}

fn two_rows(x: &[ComplexSample]) -> Features {
    let mut data: Vec<f64> = x.iter().map(|s| s.re).collect();
    data.extend(x.iter().map(|s| s.im));
    Features {
        shape: vec![2, x.len()],
        data,
    }
}

pub fn to_features(frame: &ComplexFrame, repr: Representation) -> Result<Features> {
    let x = frame.samples();
    Ok(match repr {
        Representation::Iq2Channel => two_rows(x),
        Representation::Interleaved => Features {
            shape: vec![2 * x.len()],
            data: x.iter().flat_map(|s| [s.re, s.im]).collect(),
        },
        Representation::Magnitude => Features {
            shape: vec![x.len()],
            data: x.iter().map(|s| s.norm()).collect(),
        },
        Representation::WrappedPhase => Features {
            shape: vec![x.len()],
            data: x.iter().map(|s| s.im.atan2(s.re)).collect(),
        },
        Representation::Dft => two_rows(&fft(x)),
        Representation::Spectrogram => {
            let nfft = FEATURE_SPECTROGRAM_NFFT.min(x.len());
            let s = spectrogram(frame, nfft, FEATURE_SPECTROGRAM_HOP.min(nfft))?;
            Features {
                shape: vec![s.num_freqs, s.num_frames],
                data: s.data,
            }
        }
    })
}

/// Rebuilds a frame from an `Iq2Channel` tensor.
pub fn from_iq_2channel(features: &Features) -> Option<ComplexFrame> {
    match features.shape.as_slice() {
        [2, n] if features.data.len() == 2 * n => Some(ComplexFrame::new(
            (0..*n)
                .map(|i| ComplexSample::new(features.data[i], features.data[n + i]))
                .collect(),
        )),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modulators::gen_clean;
    use crate::rng::RngStream;

    #[test]
    fn iq_round_trip() {
        let (f, _) = gen_clean(8, 4096, &mut RngStream::new(1)).unwrap();
        let t = to_features(&f, Representation::Iq2Channel).unwrap();
        assert_eq!(t.shape, vec![2, 4096]);
        assert_eq!(from_iq_2channel(&t).unwrap(), f);
        let i = to_features(&f, Representation::Interleaved).unwrap();
        assert_eq!(i.shape, vec![8192]);
        assert_eq!((i.data[2], i.data[3]), (f.samples()[1].re, f.samples()[1].im));
    }

    #[test]
    fn phase_and_magnitude() {
        let pos = ComplexFrame::new((1..50).map(|n| ComplexSample::new(n as f64, 0.0)).collect());
        let p = to_features(&pos, Representation::WrappedPhase).unwrap();
        assert!(p.data.iter().all(|&v| v == 0.0));
        let neg = ComplexFrame::new(vec![ComplexSample::new(-1.0, 0.0)]);
        assert_eq!(
            to_features(&neg, Representation::WrappedPhase).unwrap().data[0],
            std::f64::consts::PI
        );
        let (fsk, _) = gen_clean(25, 4096, &mut RngStream::new(2)).unwrap();
        let m = to_features(&fsk, Representation::Magnitude).unwrap();
        assert!(m.data.iter().all(|v| (v - 1.0).abs() < 1e-9));
    }

    #[test]
    fn transform_shapes() {
        let (f, _) = gen_clean(45, 4096, &mut RngStream::new(3)).unwrap();
        assert_eq!(to_features(&f, Representation::Dft).unwrap().shape, vec![2, 4096]);
        let s = to_features(&f, Representation::Spectrogram).unwrap();
        assert_eq!(s.shape, vec![256, (4096 - 256) / 128 + 1]);
        assert_eq!(s.data.len(), s.shape[0] * s.shape[1]);
    }
}
