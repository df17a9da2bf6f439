//! Clean-signal synthesis for all 53 classes.

pub mod constellation;
pub mod fsk;
pub mod linear;
pub mod ofdm;
pub mod pulse;

use serde::{Deserialize, Serialize};

use crate::classes::{class_info, ClassInfo, ClassKind, Family};
use crate::error::Result;
use crate::frame::ComplexFrame;
use crate::rng::RngStream;

pub use constellation::{build_constellation, ConstellationTable};
pub use fsk::{gen_fsk, FskSpec};
pub use linear::{demodulate, gen_linear_mod, linear_waveform, Demodulation, LINEAR_SPS};
pub use ofdm::{gen_ofdm, CyclicPrefix, EdgeTreatment, OfdmSpec, SubcarrierModulation};
pub use pulse::{gaussian_taps, rrc_taps, GaussianFilterSpec, RrcFilterSpec};

/// How the symbols of an example were shaped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PulseShape {
    Rrc {
        alpha: f64,
    },
    Gaussian {
        bt: f64,
    },
    /// Unfiltered CPFSK/MSK.
    Rectangular,
    /// CPFSK/MSK passed through a low-pass at `cutoff` then resampled by
    /// `rate` output samples per input sample.
    LowpassResample {
        cutoff: f64,
        rate: f64,
    },
    Ofdm(OfdmSpec),
}

/// Identity and generation parameters of one example.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalDescriptor {
    pub class_index: usize,
    pub class_name: String,
    pub family: Family,
    pub samples_per_symbol: f64,
    /// Target Es/N0 in dB; impaired examples only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<f64>,
    pub pulse: PulseShape,
}

impl SignalDescriptor {
    pub fn new(info: &ClassInfo, samples_per_symbol: f64, pulse: PulseShape) -> Self {
        SignalDescriptor {
            class_index: info.index,
            class_name: info.name.to_string(),
            family: info.family,
            samples_per_symbol,
            snr_db: None,
            pulse,
        }
    }
}

/// Dispatches to the family generator with clean defaults: RRC alpha 0.35,
/// Gaussian BT 0.35, OFDM options drawn as fair coins.
pub fn gen_clean(class_index: usize, len: usize, rng: &mut RngStream) -> Result<(ComplexFrame, SignalDescriptor)> {
    let info = class_info(class_index)?;
    match info.kind {
        ClassKind::Ask { .. } | ClassKind::Pam { .. } | ClassKind::Psk { .. } | ClassKind::Qam { .. } => {
            gen_linear_mod(class_index, rng, pulse::CLEAN_RRC_ALPHA, len)
        }
        ClassKind::Fsk { .. } => gen_fsk(info, &FskSpec::for_class(info)?, len, rng),
        ClassKind::Ofdm { .. } => {
            let spec = OfdmSpec::random_for(info, rng)?;
            gen_ofdm(info, &spec, len, rng)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::CLASSES;

    #[test]
    fn every_class_generates_unit_power_frames() {
        for info in CLASSES.iter() {
            let mut rng = RngStream::new(info.index as u64 + 100);
            let (frame, desc) = gen_clean(info.index, 4096, &mut rng).unwrap();
            assert_eq!(frame.len(), 4096, "{}", info.name);
            assert!(frame.is_finite());
            assert!((frame.mean_power().unwrap() - 1.0).abs() < 1e-12, "{}", info.name);
            assert_eq!(desc.class_index, info.index);
            assert_eq!(desc.family, info.family);
        }
    }

    #[test]
    fn dispatcher_examples() {
        let (_, d) = gen_clean(0, 4096, &mut RngStream::new(1)).unwrap();
        assert_eq!((d.family, d.samples_per_symbol), (Family::Pam, 2.0));
        let (_, d) = gen_clean(45, 4096, &mut RngStream::new(1)).unwrap();
        match d.pulse {
            PulseShape::Ofdm(spec) => assert_eq!(spec.num_subcarriers, 256),
            other => panic!("unexpected {other:?}"),
        }
        let (_, d) = gen_clean(25, 4096, &mut RngStream::new(1)).unwrap();
        assert_eq!(d.samples_per_symbol, 8.0);
        assert!(gen_clean(53, 4096, &mut RngStream::new(1)).is_err());
    }
}
