use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::classes::{ClassInfo, ClassKind, FskVariant};
use crate::dsp::filter_same;
use crate::error::{Error, Result};
use crate::frame::{ComplexFrame, ComplexSample};
use crate::rng::RngStream;

use super::pulse::{gaussian_taps, GaussianFilterSpec, CLEAN_GAUSSIAN_BT, GAUSSIAN_SPAN_SYMBOLS};
use super::{PulseShape, SignalDescriptor};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FskSpec {
    pub order: usize,
    pub variant: FskVariant,
    pub mod_index: f64,
    pub samples_per_symbol: usize,
    /// Gaussian BT product; only used by GFSK/GMSK.
    pub bt: f64,
}

impl FskSpec {
    pub fn new(order: usize, variant: FskVariant) -> Self {
        FskSpec {
            order,
            variant,
            mod_index: variant.mod_index(),
            samples_per_symbol: variant.samples_per_symbol(),
            bt: CLEAN_GAUSSIAN_BT,
        }
    }

    pub fn for_class(info: &ClassInfo) -> Result<Self> {
        match info.kind {
            ClassKind::Fsk { order, variant } => Ok(FskSpec::new(order, variant)),
            _ => Err(Error::WrongFamily {
                index: info.index,
                name: info.name,
                expected: "FSK",
            }),
        }
    }

    pub fn with_bt(mut self, bt: f64) -> Self {
        self.bt = bt;
        self
    }

    /// Instantaneous frequency of tone `k`, cycles/sample:
    /// `h (2k - M + 1) / (2 sps)`.
    pub fn tone_frequency(&self, k: usize) -> f64 {
        self.mod_index * (2.0 * k as f64 - self.order as f64 + 1.0) / (2.0 * self.samples_per_symbol as f64)
    }

    fn validate(&self) -> Result<()> {
        if ![2, 4, 8, 16].contains(&self.order) {
            return Err(Error::invalid("order", format!("{} not in {{2,4,8,16}}", self.order)));
        }
        if self.samples_per_symbol == 0 {
            return Err(Error::invalid("samples_per_symbol", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct FskWaveform {
    pub frame: ComplexFrame,
    /// Tone index of every symbol overlapping the output (plus warm-up).
    pub symbols: Vec<usize>,
    /// Symbol that starts at output sample 0.
    pub first_symbol: usize,
}

/// Continuous-phase FSK from an explicit tone sequence. `first_symbol`
/// symbols of warm-up precede the output window.
pub(crate) fn cpfsk_from_symbols(
    spec: &FskSpec,
    symbols: &[usize],
    first_symbol: usize,
    len: usize,
) -> Result<ComplexFrame> {
    let sps = spec.samples_per_symbol;
    let mut freq: Vec<ComplexSample> = symbols
        .iter()
        .flat_map(|&k| std::iter::repeat_n(ComplexSample::new(spec.tone_frequency(k), 0.0), sps))
        .collect();
    if spec.variant.is_gaussian() {
        let taps = gaussian_taps(&GaussianFilterSpec::new(spec.bt, sps))?;
        freq = filter_same(&freq, &taps);
    }
    let start = first_symbol * sps;
    let mut theta = 0.0f64;
    let samples = freq[start..start + len]
        .iter()
        .map(|f| {
            let s = ComplexSample::from_polar(1.0, theta);
            theta = (theta + TAU * f.re) % TAU;
            s
        })
        .collect();
    Ok(ComplexFrame::new(samples))
}

pub fn fsk_waveform(spec: &FskSpec, len: usize, rng: &mut RngStream) -> Result<FskWaveform> {
    spec.validate()?;
    let sps = spec.samples_per_symbol;
    let lead = GAUSSIAN_SPAN_SYMBOLS;
    let count = lead + len.div_ceil(sps) + GAUSSIAN_SPAN_SYMBOLS;
    let symbols: Vec<usize> = (0..count).map(|_| rng.index(spec.order)).collect();
    let frame = cpfsk_from_symbols(spec, &symbols, lead, len)?;
    Ok(FskWaveform {
        frame,
        symbols,
        first_symbol: lead,
    })
}

/// Constant-envelope continuous-phase FSK/MSK/GFSK/GMSK.
pub fn gen_fsk(
    class: &ClassInfo,
    spec: &FskSpec,
    len: usize,
    rng: &mut RngStream,
) -> Result<(ComplexFrame, SignalDescriptor)> {
    let wave = fsk_waveform(spec, len, rng)?;
    let pulse = if spec.variant.is_gaussian() {
        PulseShape::Gaussian { bt: spec.bt }
    } else {
        PulseShape::Rectangular
    };
    let descriptor = SignalDescriptor::new(class, spec.samples_per_symbol as f64, pulse);
    Ok((wave.frame, descriptor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::CLASSES;

    #[test]
    fn constant_envelope_for_every_variant() {
        for info in CLASSES.iter().filter(|c| matches!(c.kind, ClassKind::Fsk { .. })) {
            let spec = FskSpec::for_class(info).unwrap();
            let (frame, desc) = gen_fsk(info, &spec, 4096, &mut RngStream::new(4)).unwrap();
            assert_eq!(frame.len(), 4096);
            assert!(frame.iter().all(|s| (s.norm() - 1.0).abs() < 1e-9), "{}", info.name);
            assert_eq!(desc.samples_per_symbol, spec.samples_per_symbol as f64);
        }
    }

    #[test]
    fn msk_spacing_is_half_of_fsk() {
        let fsk = FskSpec::new(4, FskVariant::Fsk);
        let msk = FskSpec::new(4, FskVariant::Msk);
        let spacing = |s: &FskSpec| s.tone_frequency(1) - s.tone_frequency(0);
        assert!((spacing(&msk) - 0.5 * spacing(&fsk)).abs() < 1e-15);
        assert_eq!(FskSpec::new(2, FskVariant::Fsk).tone_frequency(1), 1.0 / 16.0);
    }

    #[test]
    fn phase_is_continuous_across_symbols() {
        let spec = FskSpec::new(2, FskVariant::Msk);
        let wave = fsk_waveform(&spec, 512, &mut RngStream::new(12)).unwrap();
        let s = wave.frame.samples();
        for w in s.windows(2) {
            let step = (w[1] * w[0].conj()).arg();
            assert!(step.abs() <= TAU * 0.5 / 16.0 + 1e-12);
        }
    }

    #[test]
    fn rejects_unsupported_order() {
        let mut spec = FskSpec::new(2, FskVariant::Fsk);
        spec.order = 3;
        assert!(fsk_waveform(&spec, 64, &mut RngStream::new(0)).is_err());
    }
}
