//! Half-band OFDM synthesis.
//!
//! An `N`-subcarrier symbol is built with a `2N`-point inverse DFT whose
//! occupied bins sit at `-N/2 .. N/2 - 1`, so the signal fills half of the
//! sampled band. Each symbol carries a cyclic prefix of `cp_fraction * 2N`
//! samples. Symbol-boundary discontinuities are softened either by a
//! windowed-sinc low-pass over the whole frame or by raised-cosine
//! overlap-add tapers (length `cp / 2`) inside the prefix.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::classes::{ClassInfo, ClassKind};
use crate::dsp::{filter_same, ifft_in_place, lowpass_taps};
use crate::error::{Error, Result};
use crate::frame::{ComplexFrame, ComplexSample};
use crate::rng::RngStream;

use super::constellation::{constellation_for, ConstellationTable};
use super::{PulseShape, SignalDescriptor};

pub const OFDM_SUBCARRIER_COUNTS: [usize; 12] = [64, 72, 128, 180, 256, 300, 512, 600, 900, 1024, 1200, 2048];

/// Cutoff of the transmit low-pass option, cycles/sample.
pub const OFDM_LOWPASS_CUTOFF: f64 = 0.27;
pub const OFDM_LOWPASS_TAPS: usize = 129;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubcarrierModulation {
    Bpsk,
    Qpsk,
    Qam16,
    Qam64,
    Qam256,
    Qam1024,
}

impl SubcarrierModulation {
    pub const ALL: [SubcarrierModulation; 6] = [
        SubcarrierModulation::Bpsk,
        SubcarrierModulation::Qpsk,
        SubcarrierModulation::Qam16,
        SubcarrierModulation::Qam64,
        SubcarrierModulation::Qam256,
        SubcarrierModulation::Qam1024,
    ];

    pub fn table(self) -> ConstellationTable {
        let kind = match self {
            SubcarrierModulation::Bpsk => ClassKind::Psk { order: 2 },
            SubcarrierModulation::Qpsk => ClassKind::Psk { order: 4 },
            SubcarrierModulation::Qam16 => ClassKind::Qam {
                order: 16,
                cross: false,
            },
            SubcarrierModulation::Qam64 => ClassKind::Qam {
                order: 64,
                cross: false,
            },
            SubcarrierModulation::Qam256 => ClassKind::Qam {
                order: 256,
                cross: false,
            },
            SubcarrierModulation::Qam1024 => ClassKind::Qam {
                order: 1024,
                cross: false,
            },
        };
        constellation_for(kind)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CyclicPrefix {
    Eighth,
    Quarter,
}

impl CyclicPrefix {
    pub fn fraction(self) -> f64 {
        match self {
            CyclicPrefix::Eighth => 0.125,
            CyclicPrefix::Quarter => 0.25,
        }
    }

    pub fn len_for(self, fft_len: usize) -> usize {
        match self {
            CyclicPrefix::Eighth => fft_len / 8,
            CyclicPrefix::Quarter => fft_len / 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeTreatment {
    Lowpass,
    Window,
    /// Raw concatenated symbols; analysis and test use.
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OfdmSpec {
    pub num_subcarriers: usize,
    /// One modulation shared by all subcarriers, or one drawn per subcarrier.
    pub per_subcarrier_random: bool,
    pub cyclic_prefix: CyclicPrefix,
    pub dc_present: bool,
    pub edge_treatment: EdgeTreatment,
}

impl OfdmSpec {
    pub fn new(num_subcarriers: usize) -> Self {
        OfdmSpec {
            num_subcarriers,
            per_subcarrier_random: false,
            cyclic_prefix: CyclicPrefix::Eighth,
            dc_present: true,
            edge_treatment: EdgeTreatment::None,
        }
    }

    /// Clean-dataset option draws, each an independent fair coin.
    pub fn random_for(info: &ClassInfo, rng: &mut RngStream) -> Result<Self> {
        let ClassKind::Ofdm { subcarriers } = info.kind else {
            return Err(Error::WrongFamily {
                index: info.index,
                name: info.name,
                expected: "OFDM",
            });
        };
        let per_subcarrier_random = rng.bernoulli(0.5);
        let cyclic_prefix = if rng.bernoulli(0.5) {
            CyclicPrefix::Eighth
        } else {
            CyclicPrefix::Quarter
        };
        let dc_present = rng.bernoulli(0.5);
        let edge_treatment = if rng.bernoulli(0.5) {
            EdgeTreatment::Lowpass
        } else {
            EdgeTreatment::Window
        };
        Ok(OfdmSpec {
            num_subcarriers: subcarriers,
            per_subcarrier_random,
            cyclic_prefix,
            dc_present,
            edge_treatment,
        })
    }

    pub fn fft_len(&self) -> usize {
        2 * self.num_subcarriers
    }

    pub fn cp_len(&self) -> usize {
        self.cyclic_prefix.len_for(self.fft_len())
    }

    pub fn block_len(&self) -> usize {
        self.fft_len() + self.cp_len()
    }

    /// DFT bin (0-based, natural order) of subcarrier `s`.
    pub fn bin_of(&self, s: usize) -> usize {
        let l = self.fft_len() as i64;
        let k = s as i64 - (self.num_subcarriers / 2) as i64;
        k.rem_euclid(l) as usize
    }

    /// Subcarrier that maps to DC.
    pub fn dc_subcarrier(&self) -> usize {
        self.num_subcarriers / 2
    }

    fn validate(&self) -> Result<()> {
        if !OFDM_SUBCARRIER_COUNTS.contains(&self.num_subcarriers) {
            return Err(Error::invalid(
                "num_subcarriers",
                format!("{} is not a supported count", self.num_subcarriers),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct OfdmWaveform {
    pub frame: ComplexFrame,
    pub spec: OfdmSpec,
    /// Modulation of each subcarrier.
    pub modulations: Vec<SubcarrierModulation>,
    /// Subcarrier values of each OFDM symbol overlapping the frame, in
    /// order. Symbol `i` starts (prefix included) at sample
    /// `i * block_len`. Nulled DC carries zero.
    pub symbols: Vec<Vec<ComplexSample>>,
    /// Time-domain blocks (prefix + body) before edge treatment and
    /// normalization, aligned with `symbols`.
    pub raw_blocks: Vec<Vec<ComplexSample>>,
    /// Normalization gain applied to the raw signal.
    pub gain: f64,
}

fn raised_cosine_rise(len: usize) -> Vec<f64> {
    (0..len)
        .map(|i| 0.5 - 0.5 * (PI * (i as f64 + 0.5) / len as f64).cos())
        .collect()
}

pub fn ofdm_waveform(spec: &OfdmSpec, len: usize, rng: &mut RngStream) -> Result<OfdmWaveform> {
    spec.validate()?;
    let n = spec.num_subcarriers;
    let fft_len = spec.fft_len();
    let cp = spec.cp_len();
    let block = spec.block_len();

    let modulations: Vec<SubcarrierModulation> = if spec.per_subcarrier_random {
        (0..n)
            .map(|_| SubcarrierModulation::ALL[rng.index(SubcarrierModulation::ALL.len())])
            .collect()
    } else {
        vec![SubcarrierModulation::ALL[rng.index(SubcarrierModulation::ALL.len())]; n]
    };
    let mut tables: Vec<(SubcarrierModulation, ConstellationTable)> = Vec::new();
    for m in &modulations {
        if !tables.iter().any(|(k, _)| k == m) {
            tables.push((*m, m.table()));
        }
    }
    let table_of = |m: SubcarrierModulation| &tables.iter().find(|(k, _)| *k == m).unwrap().1;

    // One warm-up block precedes the output so filter and taper transients
    // fall outside it; the output starts on a block boundary.
    let tail = OFDM_LOWPASS_TAPS;
    let num_blocks = (block + len + tail).div_ceil(block);
    let mut all_symbols = Vec::with_capacity(num_blocks);
    let mut blocks = Vec::with_capacity(num_blocks);
    for _ in 0..num_blocks {
        let values: Vec<ComplexSample> = (0..n)
            .map(|s| {
                let table = table_of(modulations[s]);
                let v = table.points[rng.index(table.order())];
                if !spec.dc_present && s == spec.dc_subcarrier() {
                    ComplexSample::new(0.0, 0.0)
                } else {
                    v
                }
            })
            .collect();
        let mut body = vec![ComplexSample::new(0.0, 0.0); fft_len];
        for (s, &v) in values.iter().enumerate() {
            body[spec.bin_of(s)] = v;
        }
        ifft_in_place(&mut body);
        let mut block_samples = Vec::with_capacity(block);
        block_samples.extend_from_slice(&body[fft_len - cp..]);
        block_samples.extend_from_slice(&body);
        all_symbols.push(values);
        blocks.push(block_samples);
    }

    let total = num_blocks * block;
    let mut signal: Vec<ComplexSample> = Vec::with_capacity(total + cp);
    match spec.edge_treatment {
        EdgeTreatment::None | EdgeTreatment::Lowpass => {
            for b in &blocks {
                signal.extend_from_slice(b);
            }
        }
        EdgeTreatment::Window => {
            let taper = cp / 2;
            let rise = raised_cosine_rise(taper);
            signal.resize(total + taper, ComplexSample::new(0.0, 0.0));
            for (i, b) in blocks.iter().enumerate() {
                let start = i * block;
                for (j, &v) in b.iter().enumerate() {
                    let w = if j < taper { rise[j] } else { 1.0 };
                    signal[start + j] += v * w;
                }
                // Cyclic suffix: continuation of the body, tapering down.
                for (j, &r) in rise.iter().enumerate() {
                    signal[start + block + j] += b[cp + j] * (1.0 - r);
                }
            }
        }
    }
    if spec.edge_treatment == EdgeTreatment::Lowpass {
        signal = filter_same(&signal, &lowpass_taps(OFDM_LOWPASS_CUTOFF, OFDM_LOWPASS_TAPS));
    }

    let window = ComplexFrame::new(signal[block..block + len].to_vec());
    let power = window.mean_power()?;
    if power <= 0.0 {
        return Err(Error::ZeroPower);
    }
    let gain = 1.0 / power.sqrt();
    let frame = window.scale(gain);
    let used = len.div_ceil(block);
    Ok(OfdmWaveform {
        frame,
        spec: spec.clone(),
        modulations,
        symbols: all_symbols.into_iter().skip(1).take(used).collect(),
        raw_blocks: blocks.into_iter().skip(1).take(used).collect(),
        gain,
    })
}

pub fn gen_ofdm(
    class: &ClassInfo,
    spec: &OfdmSpec,
    len: usize,
    rng: &mut RngStream,
) -> Result<(ComplexFrame, SignalDescriptor)> {
    let wave = ofdm_waveform(spec, len, rng)?;
    // Half-band occupancy stands in for 2 samples/symbol.
    let descriptor = SignalDescriptor::new(class, 2.0, PulseShape::Ofdm(spec.clone()));
    Ok((wave.frame, descriptor))
}
