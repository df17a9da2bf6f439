//! Impaired-dataset channel model.
//!
//! The chain applies, in this fixed order, each gated by an independent
//! Bernoulli draw: phase shift, time shift, frequency shift, Rayleigh
//! fading, IQ imbalance, resampling. The result is renormalized to unit
//! power and AWGN is added last so the target Es/N0 holds at the output.
//!
//! All random draws happen up front and are captured in an
//! [`ImpairmentRecord`]; the frame is then produced by [`replay`], so a
//! stored record reproduces its frame exactly.

pub mod ops;
pub mod shaping;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dsp::rational_approx;
use crate::error::{Error, Result};
use crate::frame::{ComplexFrame, ComplexSample};
use crate::modulators::SignalDescriptor;
use crate::rng::RngStream;

pub use ops::{
    add_awgn, freq_shift, iq_imbalance, noise_power_for, phase_shift, random_resample, rayleigh_channel, time_shift,
};
pub use shaping::{fsk_lpf_resample, gen_randomized, random_pulse_shape_gaussian, random_pulse_shape_linear};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GatedRange {
    pub probability: f64,
    pub low: f64,
    pub high: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GatedIntRange {
    pub probability: f64,
    pub low: i64,
    pub high: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IqImbalanceRange {
    pub probability: f64,
    pub amp_db: (f64, f64),
    pub phase_rad: (f64, f64),
    pub dc_offset: (f64, f64),
}

/// Probabilities and parameter ranges of every impairment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpairmentProfile {
    pub phase_shift: GatedRange,
    pub time_shift: GatedIntRange,
    pub freq_shift: GatedRange,
    pub rayleigh_taps: GatedIntRange,
    pub iq_imbalance: IqImbalanceRange,
    pub resample: GatedRange,
    /// Es/N0 range in dB; `None` disables noise.
    pub esn0_db: Option<(f64, f64)>,
}

impl Default for ImpairmentProfile {
    fn default() -> Self {
        ImpairmentProfile {
            phase_shift: GatedRange {
                probability: 0.9,
                low: -PI,
                high: PI,
            },
            time_shift: GatedIntRange {
                probability: 0.9,
                low: -32,
                high: 32,
            },
            freq_shift: GatedRange {
                probability: 0.7,
                low: -0.16,
                high: 0.16,
            },
            rayleigh_taps: GatedIntRange {
                probability: 0.5,
                low: 2,
                high: 20,
            },
            iq_imbalance: IqImbalanceRange {
                probability: 0.9,
                amp_db: (-3.0, 3.0),
                phase_rad: (-PI / 180.0, PI / 180.0),
                dc_offset: (-0.1, 0.1),
            },
            resample: GatedRange {
                probability: 0.5,
                low: 0.75,
                high: 1.5,
            },
            esn0_db: Some((-2.0, 30.0)),
        }
    }
}

impl ImpairmentProfile {
    /// Every gate closed and no noise.
    pub fn disabled() -> Self {
        let mut p = ImpairmentProfile::default();
        p.phase_shift.probability = 0.0;
        p.time_shift.probability = 0.0;
        p.freq_shift.probability = 0.0;
        p.rayleigh_taps.probability = 0.0;
        p.iq_imbalance.probability = 0.0;
        p.resample.probability = 0.0;
        p.esn0_db = None;
        p
    }

    pub fn validate(&self) -> Result<()> {
        let probs = [
            ("phase_shift", self.phase_shift.probability),
            ("time_shift", self.time_shift.probability),
            ("freq_shift", self.freq_shift.probability),
            ("rayleigh_taps", self.rayleigh_taps.probability),
            ("iq_imbalance", self.iq_imbalance.probability),
            ("resample", self.resample.probability),
        ];
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid(name, format!("probability {p} not in [0, 1]")));
            }
        }
        if self.rayleigh_taps.low < 2 || self.rayleigh_taps.high > ops::RAYLEIGH_MAX_TAPS as i64 {
            return Err(Error::invalid("rayleigh_taps", "tap counts must lie in 2..=20"));
        }
        if self.resample.low < 0.75 || self.resample.high > 1.5 {
            return Err(Error::invalid("resample", "rates must lie in [0.75, 1.5]"));
        }
        if self.freq_shift.low.abs() >= 0.5 || self.freq_shift.high.abs() >= 0.5 {
            return Err(Error::invalid("freq_shift", "|f| must stay below 0.5"));
        }
        Ok(())
    }
}

/// One applied impairment with its drawn parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ImpairmentStep {
    PhaseShift {
        phi: f64,
    },
    TimeShift {
        shift: i64,
    },
    FreqShift {
        freq: f64,
    },
    Rayleigh {
        taps: Vec<ComplexSample>,
    },
    IqImbalance {
        amp_db: f64,
        phase_rad: f64,
        dc_offset: f64,
    },
    Resample {
        rate: f64,
        up: u64,
        down: u64,
    },
    Awgn {
        esn0_db: f64,
        samples_per_symbol: f64,
        noise_power: f64,
        noise_key: u64,
    },
}

impl ImpairmentStep {
    pub fn kind(&self) -> &'static str {
        match self {
            ImpairmentStep::PhaseShift { .. } => "phase_shift",
            ImpairmentStep::TimeShift { .. } => "time_shift",
            ImpairmentStep::FreqShift { .. } => "freq_shift",
            ImpairmentStep::Rayleigh { .. } => "rayleigh",
            ImpairmentStep::IqImbalance { .. } => "iq_imbalance",
            ImpairmentStep::Resample { .. } => "resample",
            ImpairmentStep::Awgn { .. } => "awgn",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ImpairmentRecord {
    pub steps: Vec<ImpairmentStep>,
    /// Target Es/N0 in dB, when noise was added.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_esn0_db: Option<f64>,
}

impl ImpairmentRecord {
    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn applied(&self, kind: &str) -> bool {
        self.steps.iter().any(|s| s.kind() == kind)
    }
}

/// Intermediate signals of one chain run, for calibration checks.
#[derive(Debug, Clone)]
pub struct ChainTrace {
    pub frame: ComplexFrame,
    pub record: ImpairmentRecord,
    /// Unit-power frame right before noise was added.
    pub pre_noise: ComplexFrame,
    /// Injected noise realization (empty when no noise was added).
    pub noise: Vec<ComplexSample>,
}

/// Draws every gate and parameter for one example.
pub fn draw_record(
    descriptor: &SignalDescriptor,
    profile: &ImpairmentProfile,
    rng: &mut RngStream,
) -> Result<ImpairmentRecord> {
    profile.validate()?;
    let mut steps = Vec::new();
    let p = profile;

    if rng.bernoulli(p.phase_shift.probability) {
        let phi = rng.uniform_range(p.phase_shift.low, p.phase_shift.high);
        steps.push(ImpairmentStep::PhaseShift { phi });
    }
    if rng.bernoulli(p.time_shift.probability) {
        let shift = rng.int_inclusive(p.time_shift.low, p.time_shift.high);
        steps.push(ImpairmentStep::TimeShift { shift });
    }
    if rng.bernoulli(p.freq_shift.probability) {
        let freq = rng.uniform_range(p.freq_shift.low, p.freq_shift.high);
        steps.push(ImpairmentStep::FreqShift { freq });
    }
    if rng.bernoulli(p.rayleigh_taps.probability) {
        let n = rng.int_inclusive(p.rayleigh_taps.low, p.rayleigh_taps.high) as usize;
        steps.push(ImpairmentStep::Rayleigh {
            taps: ops::fading_taps(n, rng),
        });
    }
    if rng.bernoulli(p.iq_imbalance.probability) {
        let r = &p.iq_imbalance;
        let amp_db = rng.uniform_range(r.amp_db.0, r.amp_db.1);
        let phase_rad = rng.uniform_range(r.phase_rad.0, r.phase_rad.1);
        let dc_offset = rng.uniform_range(r.dc_offset.0, r.dc_offset.1);
        steps.push(ImpairmentStep::IqImbalance {
            amp_db,
            phase_rad,
            dc_offset,
        });
    }
    let mut rate_applied = 1.0;
    if rng.bernoulli(p.resample.probability) {
        let rate = rng.uniform_range(p.resample.low, p.resample.high);
        let (up, down) = rational_approx(rate, ops::RESAMPLE_MAX_DENOMINATOR);
        rate_applied = up as f64 / down as f64;
        steps.push(ImpairmentStep::Resample { rate, up, down });
    }
    let mut target_esn0_db = None;
    if let Some((low, high)) = p.esn0_db {
        let esn0_db = rng.uniform_range(low, high);
        // Resampling stretches each symbol over `rate` times more samples.
        let samples_per_symbol = descriptor.samples_per_symbol * rate_applied;
        steps.push(ImpairmentStep::Awgn {
            esn0_db,
            samples_per_symbol,
            noise_power: noise_power_for(esn0_db, samples_per_symbol),
            noise_key: rng.next_u64(),
        });
        target_esn0_db = Some(esn0_db);
    }
    Ok(ImpairmentRecord { steps, target_esn0_db })
}

/// Applies a record to a clean frame, returning every intermediate needed
/// for calibration checks.
pub fn replay_traced(record: &ImpairmentRecord, clean: &ComplexFrame) -> Result<ChainTrace> {
    let mut frame = clean.clone();
    let mut pre_noise = None;
    let mut noise = Vec::new();
    for step in &record.steps {
        frame = match step {
            ImpairmentStep::PhaseShift { phi } => phase_shift(&frame, *phi)?,
            ImpairmentStep::TimeShift { shift } => time_shift(&frame, *shift)?,
            ImpairmentStep::FreqShift { freq } => freq_shift(&frame, *freq)?,
            ImpairmentStep::Rayleigh { taps } => ops::apply_channel(&frame, taps),
            ImpairmentStep::IqImbalance {
                amp_db,
                phase_rad,
                dc_offset,
            } => iq_imbalance(&frame, *amp_db, *phase_rad, *dc_offset),
            ImpairmentStep::Resample { up, down, .. } => ops::resample_ratio(&frame, *up, *down),
            ImpairmentStep::Awgn {
                noise_power, noise_key, ..
            } => {
                let signal = frame.normalize_unit_power()?;
                noise = ops::noise_vector(signal.len(), *noise_power, *noise_key);
                let noisy = signal.iter().zip(&noise).map(|(s, n)| s + n).collect();
                pre_noise = Some(signal);
                ComplexFrame::new(noisy)
            }
        };
    }
    let pre_noise = match pre_noise {
        Some(f) => f,
        None => frame.clone(),
    };
    Ok(ChainTrace {
        frame,
        record: record.clone(),
        pre_noise,
        noise,
    })
}

/// Reproduces the impaired frame stored with `record`.
pub fn replay(record: &ImpairmentRecord, clean: &ComplexFrame) -> Result<ComplexFrame> {
    Ok(replay_traced(record, clean)?.frame)
}

pub fn apply_impairment_chain_traced(
    clean: &ComplexFrame,
    descriptor: &SignalDescriptor,
    profile: &ImpairmentProfile,
    rng: &mut RngStream,
) -> Result<ChainTrace> {
    let record = draw_record(descriptor, profile, rng)?;
    replay_traced(&record, clean)
}

pub fn apply_impairment_chain(
    clean: &ComplexFrame,
    descriptor: &SignalDescriptor,
    profile: &ImpairmentProfile,
    rng: &mut RngStream,
) -> Result<(ComplexFrame, ImpairmentRecord)> {
    let trace = apply_impairment_chain_traced(clean, descriptor, profile, rng)?;
    Ok((trace.frame, trace.record))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modulators::gen_clean;

    #[test]
    fn disabled_profile_is_identity() {
        let (clean, desc) = gen_clean(8, 4096, &mut RngStream::new(1)).unwrap();
        let (out, record) =
            apply_impairment_chain(&clean, &desc, &ImpairmentProfile::disabled(), &mut RngStream::new(2)).unwrap();
        assert_eq!(out, clean);
        assert!(record.is_empty());
    }

    #[test]
    fn replay_is_bit_exact_through_json() {
        for class in [1, 24, 27, 45] {
            let (clean, desc) = gen_clean(class, 4096, &mut RngStream::new(class as u64)).unwrap();
            let profile = ImpairmentProfile::default();
            let (out, record) = apply_impairment_chain(&clean, &desc, &profile, &mut RngStream::new(9)).unwrap();
            let json = serde_json::to_string(&record).unwrap();
            let back: ImpairmentRecord = serde_json::from_str(&json).unwrap();
            assert_eq!(back, record);
            assert_eq!(replay(&back, &clean).unwrap(), out);
            assert_eq!(out.len(), 4096);
        }
    }

    #[test]
    fn chain_is_deterministic() {
        let (clean, desc) = gen_clean(30, 4096, &mut RngStream::new(3)).unwrap();
        let profile = ImpairmentProfile::default();
        let a = apply_impairment_chain(&clean, &desc, &profile, &mut RngStream::new(4)).unwrap();
        let b = apply_impairment_chain(&clean, &desc, &profile, &mut RngStream::new(4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn gate_rates_match_profile() {
        let (clean, desc) = gen_clean(4, 256, &mut RngStream::new(5)).unwrap();
        let profile = ImpairmentProfile::default();
        let mut rng = RngStream::new(6);
        let kinds = [
            "phase_shift",
            "time_shift",
            "freq_shift",
            "rayleigh",
            "iq_imbalance",
            "resample",
        ];
        let mut counts = [0usize; 6];
        let trials = 10_000;
        for _ in 0..trials {
            let record = draw_record(&desc, &profile, &mut rng).unwrap();
            for (c, k) in counts.iter_mut().zip(kinds) {
                *c += record.applied(k) as usize;
            }
        }
        let _ = clean;
        for (c, p) in counts.iter().zip([0.9, 0.9, 0.7, 0.5, 0.9, 0.5]) {
            let rate = *c as f64 / trials as f64;
            assert!((rate - p).abs() < 0.02, "rate {rate} vs {p}");
        }
    }

    #[test]
    fn awgn_step_hits_target_esn0() {
        let (clean, desc) = gen_clean(17, 4096, &mut RngStream::new(7)).unwrap();
        let trace = apply_impairment_chain_traced(&clean, &desc, &ImpairmentProfile::default(), &mut RngStream::new(8))
            .unwrap();
        let target = trace.record.target_esn0_db.unwrap();
        let sps = match trace.record.steps.last().unwrap() {
            ImpairmentStep::Awgn { samples_per_symbol, .. } => *samples_per_symbol,
            other => panic!("{other:?}"),
        };
        let ps = trace.pre_noise.mean_power().unwrap();
        let pn = crate::frame::power_of(&trace.noise);
        let measured = 10.0 * (ps * sps / pn).log10();
        assert!((measured - target).abs() < 1e-9);
        assert!((-2.0..30.0).contains(&target));
    }

    #[test]
    fn invalid_profile_is_rejected() {
        let (_, desc) = gen_clean(1, 64, &mut RngStream::new(0)).unwrap();
        let mut p = ImpairmentProfile::default();
        p.freq_shift.probability = 1.5;
        assert!(draw_record(&desc, &p, &mut RngStream::new(0)).is_err());
    }
}
