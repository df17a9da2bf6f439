//! Declarative augmentation pipelines.
//!
//! A pipeline config is a JSON list of `{kind, probability, params}`
//! entries applied in order; each entry fires with its own probability.
//! Omitted params take the defaults listed by [`AugmentPipeline::defaults`].

use std::path::Path;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::{Map, Value};

use super::basic::{
    amplitude_reversal, channel_swap, cutout, drop_samples, magnitude_rescale, patch_shuffle, quantize,
    spectral_inversion, time_reversal, CutoutFill, DropFill, Rounding,
};
use super::extra::{
    add_slope, agc, clip, gain_drift, lo_drift, random_convolve, signal_rolloff, time_varying_noise, AgcParams,
    RolloffSide,
};
use crate::error::{Error, Result};
use crate::frame::ComplexFrame;
use crate::rng::RngStream;

/// Inclusive real range `[low, high]`.
pub type Span = [f64; 2];
/// Inclusive integer range `[low, high]`.
pub type CountSpan = [usize; 2];

fn draw(rng: &mut RngStream, s: Span) -> f64 {
    if s[0] == s[1] {
        s[0]
    } else {
        rng.uniform_range(s[0], s[1])
    }
}

fn draw_count(rng: &mut RngStream, s: CountSpan) -> usize {
    rng.int_inclusive(s[0] as i64, s[1] as i64) as usize
}

fn pick<T: Copy>(rng: &mut RngStream, fixed: Option<T>, all: &[T]) -> T {
    fixed.unwrap_or_else(|| all[rng.index(all.len())])
}

fn check_span(name: &'static str, s: Span, low: f64, high: f64) -> Result<()> {
    if s[0] <= s[1] && s[0] >= low && s[1] <= high {
        Ok(())
    } else {
        Err(Error::invalid(
            name,
            format!("{s:?} must be ordered within [{low}, {high}]"),
        ))
    }
}

fn check_count(name: &'static str, s: CountSpan, low: usize) -> Result<()> {
    if s[0] <= s[1] && s[0] >= low {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("{s:?} must be ordered with low >= {low}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DropSamplesParams {
    pub drop_rate: Span,
    pub region_len: CountSpan,
    /// `None` draws a fill mode per call.
    pub fill: Option<DropFill>,
}

impl Default for DropSamplesParams {
    fn default() -> Self {
        DropSamplesParams {
            drop_rate: [0.01, 0.05],
            region_len: [1, 64],
            fill: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuantizeParams {
    pub num_levels: CountSpan,
    pub rounding: Option<Rounding>,
}

impl Default for QuantizeParams {
    fn default() -> Self {
        QuantizeParams {
            num_levels: [16, 128],
            rounding: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RescaleParams {
    /// Start position as a fraction of the frame length.
    pub start_frac: Span,
    pub scale: Span,
}

impl Default for RescaleParams {
    fn default() -> Self {
        RescaleParams {
            start_frac: [0.0, 1.0],
            scale: [0.5, 2.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CutoutParams {
    pub duration_frac: Span,
    pub fill: Option<CutoutFill>,
}

impl Default for CutoutParams {
    fn default() -> Self {
        CutoutParams {
            duration_frac: [0.05, 0.25],
            fill: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PatchShuffleParams {
    pub patch_len: CountSpan,
    pub shuffle_ratio: Span,
}

impl Default for PatchShuffleParams {
    fn default() -> Self {
        PatchShuffleParams {
            patch_len: [3, 10],
            shuffle_ratio: [0.01, 0.05],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RolloffParams {
    pub side: Option<RolloffSide>,
    pub edge_frac: Span,
}

impl Default for RolloffParams {
    fn default() -> Self {
        RolloffParams {
            side: None,
            edge_frac: [0.02, 0.15],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LoDriftParams {
    pub drift_rate: Span,
    pub max_drift: Span,
}

impl Default for LoDriftParams {
    fn default() -> Self {
        LoDriftParams {
            drift_rate: [1e-5, 1e-4],
            max_drift: [0.005, 0.05],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GainDriftParams {
    pub drift_rate: Span,
    pub max_drift: Span,
}

impl Default for GainDriftParams {
    fn default() -> Self {
        GainDriftParams {
            drift_rate: [1e-4, 1e-3],
            max_drift: [0.01, 0.1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TimeVaryingNoiseParams {
    pub snr_low_db: Span,
    pub snr_high_db: Span,
    pub inflections: CountSpan,
}

impl Default for TimeVaryingNoiseParams {
    fn default() -> Self {
        TimeVaryingNoiseParams {
            snr_low_db: [0.0, 10.0],
            snr_high_db: [10.0, 30.0],
            inflections: [0, 5],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClipParams {
    pub percentage: Span,
}

impl Default for ClipParams {
    fn default() -> Self {
        ClipParams {
            percentage: [0.75, 0.95],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConvolveParams {
    pub num_taps: CountSpan,
    pub alpha: Span,
}

impl Default for ConvolveParams {
    fn default() -> Self {
        ConvolveParams {
            num_taps: [2, 5],
            alpha: [0.1, 0.5],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TimeReversalParams {
    pub undo_inversion: bool,
}

impl Default for TimeReversalParams {
    fn default() -> Self {
        TimeReversalParams { undo_inversion: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RandAugmentParams {
    pub n: usize,
    /// `None` selects from [`rand_augment_set`].
    #[serde(deserialize_with = "deserialize_ops")]
    pub ops: Option<Vec<Transform>>,
}

const UNIT_KINDS: [&str; 5] = [
    "identity",
    "spectral_inversion",
    "channel_swap",
    "amplitude_reversal",
    "add_slope",
];

/// Inserts the `params` member a config entry may omit.
fn complete_entry(mut value: Value) -> Value {
    if let Value::Object(map) = &mut value {
        if !map.contains_key("params") {
            let unit = map
                .get("kind")
                .and_then(Value::as_str)
                .is_some_and(|k| UNIT_KINDS.contains(&k));
            map.insert(
                "params".into(),
                if unit { Value::Null } else { Value::Object(Map::new()) },
            );
        }
    }
    value
}

fn transform_from_value(value: Value) -> serde_json::Result<Transform> {
    serde_json::from_value(complete_entry(value))
}

fn deserialize_ops<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Vec<Transform>>, D::Error> {
    let raw: Option<Vec<Value>> = Option::deserialize(d)?;
    raw.map(|ops| {
        ops.into_iter()
            .map(transform_from_value)
            .collect::<serde_json::Result<Vec<_>>>()
    })
    .transpose()
    .map_err(D::Error::custom)
}

impl Default for RandAugmentParams {
    fn default() -> Self {
        RandAugmentParams { n: 2, ops: None }
    }
}

/// One transform with its parameter ranges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum Transform {
    Identity,
    TimeReversal(#[serde(default)] TimeReversalParams),
    SpectralInversion,
    ChannelSwap,
    AmplitudeReversal,
    DropSamples(#[serde(default)] DropSamplesParams),
    Quantize(#[serde(default)] QuantizeParams),
    MagnitudeRescale(#[serde(default)] RescaleParams),
    Cutout(#[serde(default)] CutoutParams),
    PatchShuffle(#[serde(default)] PatchShuffleParams),
    SignalRolloff(#[serde(default)] RolloffParams),
    LoDrift(#[serde(default)] LoDriftParams),
    TimeVaryingNoise(#[serde(default)] TimeVaryingNoiseParams),
    Clip(#[serde(default)] ClipParams),
    AddSlope,
    RandomConvolve(#[serde(default)] ConvolveParams),
    GainDrift(#[serde(default)] GainDriftParams),
    Agc(#[serde(default)] AgcParams),
    RandAugment(#[serde(default)] RandAugmentParams),
}

/// The nine-entry signals RandAugment set.
pub fn rand_augment_set() -> Vec<Transform> {
    vec![
        Transform::SpectralInversion,
        Transform::ChannelSwap,
        Transform::AmplitudeReversal,
        Transform::Cutout(CutoutParams::default()),
        Transform::DropSamples(DropSamplesParams::default()),
        Transform::Quantize(QuantizeParams::default()),
        Transform::MagnitudeRescale(RescaleParams::default()),
        Transform::PatchShuffle(PatchShuffleParams::default()),
        Transform::Identity,
    ]
}

impl Transform {
    pub fn name(&self) -> &'static str {
        match self {
            Transform::Identity => "identity",
            Transform::TimeReversal(_) => "time_reversal",
            Transform::SpectralInversion => "spectral_inversion",
            Transform::ChannelSwap => "channel_swap",
            Transform::AmplitudeReversal => "amplitude_reversal",
            Transform::DropSamples(_) => "drop_samples",
            Transform::Quantize(_) => "quantize",
            Transform::MagnitudeRescale(_) => "magnitude_rescale",
            Transform::Cutout(_) => "cutout",
            Transform::PatchShuffle(_) => "patch_shuffle",
            Transform::SignalRolloff(_) => "signal_rolloff",
            Transform::LoDrift(_) => "lo_drift",
            Transform::TimeVaryingNoise(_) => "time_varying_noise",
            Transform::Clip(_) => "clip",
            Transform::AddSlope => "add_slope",
            Transform::RandomConvolve(_) => "random_convolve",
            Transform::GainDrift(_) => "gain_drift",
            Transform::Agc(_) => "agc",
            Transform::RandAugment(_) => "rand_augment",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Transform::DropSamples(p) => {
                check_span("drop_rate", p.drop_rate, 0.0, 1.0)?;
                check_count("region_len", p.region_len, 1)
            }
            Transform::Quantize(p) => check_count("num_levels", p.num_levels, 2),
            Transform::MagnitudeRescale(p) => {
                check_span("start_frac", p.start_frac, 0.0, 1.0)?;
                check_span("scale", p.scale, 0.0, f64::MAX)
            }
            Transform::Cutout(p) => check_span("duration_frac", p.duration_frac, 0.0, 1.0),
            Transform::PatchShuffle(p) => {
                check_count("patch_len", p.patch_len, 1)?;
                check_span("shuffle_ratio", p.shuffle_ratio, 0.0, 1.0)
            }
            Transform::SignalRolloff(p) => check_span("edge_frac", p.edge_frac, 0.0, 0.5),
            Transform::LoDrift(p) => {
                check_span("drift_rate", p.drift_rate, 0.0, 0.5)?;
                check_span("max_drift", p.max_drift, 0.0, 0.499)
            }
            Transform::GainDrift(p) => {
                check_span("drift_rate", p.drift_rate, 0.0, 1.0)?;
                check_span("max_drift", p.max_drift, 0.0, 0.999)
            }
            Transform::TimeVaryingNoise(p) => {
                check_span("snr_low_db", p.snr_low_db, -100.0, 100.0)?;
                check_span("snr_high_db", p.snr_high_db, -100.0, 100.0)?;
                if p.snr_low_db[1] > p.snr_high_db[0] {
                    return Err(Error::invalid("snr_low_db", "low range must not exceed the high range"));
                }
                check_count("inflections", p.inflections, 0)
            }
            Transform::Clip(p) => check_span("percentage", p.percentage, f64::MIN_POSITIVE, 1.0),
            Transform::RandomConvolve(p) => {
                check_count("num_taps", p.num_taps, 1)?;
                check_span("alpha", p.alpha, 0.0, 1.0)
            }
            Transform::Agc(p) => p.validate(),
            Transform::RandAugment(p) => match &p.ops {
                Some(ops) if ops.is_empty() => Err(Error::invalid("ops", "RandAugment needs at least one op")),
                Some(ops) => ops.iter().try_for_each(Transform::validate),
                None => Ok(()),
            },
            _ => Ok(()),
        }
    }

    /// Draws this transform's parameters from `rng` and applies it.
    pub fn apply(&self, frame: &ComplexFrame, rng: &mut RngStream) -> Result<ComplexFrame> {
        Ok(match self {
            Transform::Identity => frame.clone(),
            Transform::TimeReversal(p) => time_reversal(frame, p.undo_inversion),
            Transform::SpectralInversion => spectral_inversion(frame),
            Transform::ChannelSwap => channel_swap(frame),
            Transform::AmplitudeReversal => amplitude_reversal(frame),
            Transform::DropSamples(p) => {
                let rate = draw(rng, p.drop_rate);
                let fill = pick(rng, p.fill, &DropFill::ALL);
                drop_samples(frame, rng, rate, (p.region_len[0], p.region_len[1]), fill)?
            }
            Transform::Quantize(p) => {
                let levels = draw_count(rng, p.num_levels);
                let rounding = pick(rng, p.rounding, &Rounding::ALL);
                quantize(frame, levels, rounding)?
            }
            Transform::MagnitudeRescale(p) => {
                let start = (draw(rng, p.start_frac) * frame.len() as f64) as usize;
                let scale = draw(rng, p.scale);
                magnitude_rescale(frame, start.min(frame.len()), scale)?
            }
            Transform::Cutout(p) => {
                let dur = draw(rng, p.duration_frac);
                let fill = pick(rng, p.fill, &CutoutFill::ALL);
                cutout(frame, rng, dur, fill)?
            }
            Transform::PatchShuffle(p) => {
                let ratio = draw(rng, p.shuffle_ratio);
                patch_shuffle(frame, rng, (p.patch_len[0], p.patch_len[1]), ratio)?
            }
            Transform::SignalRolloff(p) => {
                let side = pick(rng, p.side, &RolloffSide::ALL);
                signal_rolloff(frame, side, draw(rng, p.edge_frac))?
            }
            Transform::LoDrift(p) => {
                let rate = draw(rng, p.drift_rate);
                let max = draw(rng, p.max_drift);
                lo_drift(frame, rng, rate, max)?
            }
            Transform::TimeVaryingNoise(p) => {
                let low = draw(rng, p.snr_low_db);
                let high = draw(rng, p.snr_high_db);
                let inflections = draw_count(rng, p.inflections);
                time_varying_noise(frame, rng, low, high, inflections)?
            }
            Transform::Clip(p) => clip(frame, draw(rng, p.percentage))?,
            Transform::AddSlope => add_slope(frame),
            Transform::RandomConvolve(p) => {
                let taps = draw_count(rng, p.num_taps);
                let alpha = draw(rng, p.alpha);
                random_convolve(frame, rng, taps, alpha)?
            }
            Transform::GainDrift(p) => {
                let rate = draw(rng, p.drift_rate);
                let max = draw(rng, p.max_drift);
                gain_drift(frame, rng, rate, max)?
            }
            Transform::Agc(p) => agc(frame, p)?,
            Transform::RandAugment(p) => match &p.ops {
                Some(ops) => rand_augment(frame, rng, ops, p.n)?,
                None => rand_augment(frame, rng, &rand_augment_set(), p.n)?,
            },
        })
    }
}

/// Applies `n` transforms chosen uniformly with replacement from `ops`.
pub fn rand_augment(frame: &ComplexFrame, rng: &mut RngStream, ops: &[Transform], n: usize) -> Result<ComplexFrame> {
    if n > 0 && ops.is_empty() {
        return Err(Error::invalid("ops", "RandAugment needs at least one op"));
    }
    let mut out = frame.clone();
    for _ in 0..n {
        let op = &ops[rng.index(ops.len())];
        out = op.apply(&out, rng)?;
    }
    Ok(out)
}

fn one() -> f64 {
    1.0
}

/// A transform gated by an independent Bernoulli draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Value")]
pub struct AugmentSpec {
    #[serde(flatten)]
    pub transform: Transform,
    #[serde(default = "one")]
    pub probability: f64,
}

impl TryFrom<Value> for AugmentSpec {
    type Error = serde_json::Error;

    fn try_from(value: Value) -> serde_json::Result<Self> {
        let mut value = complete_entry(value);
        let probability = match value.as_object_mut().and_then(|m| m.remove("probability")) {
            Some(p) => serde_json::from_value(p)?,
            None => one(),
        };
        Ok(AugmentSpec {
            transform: transform_from_value(value)?,
            probability,
        })
    }
}

impl AugmentSpec {
    pub fn new(transform: Transform, probability: f64) -> Self {
        AugmentSpec { transform, probability }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.probability) {
            return Err(Error::invalid(
                "probability",
                format!("{} not in [0, 1]", self.probability),
            ));
        }
        self.transform.validate()
    }

    /// Returns the output and whether the transform fired.
    pub fn apply(&self, frame: &ComplexFrame, rng: &mut RngStream) -> Result<(ComplexFrame, bool)> {
        if rng.bernoulli(self.probability) {
            Ok((self.transform.apply(frame, rng)?, true))
        } else {
            Ok((frame.clone(), false))
        }
    }
}

/// Ordered, immutable list of gated transforms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AugmentPipeline {
    steps: Vec<AugmentSpec>,
}

impl AugmentPipeline {
    pub fn new(steps: Vec<AugmentSpec>) -> Result<Self> {
        steps.iter().try_for_each(AugmentSpec::validate)?;
        Ok(AugmentPipeline { steps })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        AugmentPipeline::new(serde_json::from_str(text)?)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        AugmentPipeline::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn steps(&self) -> &[AugmentSpec] {
        &self.steps
    }

    /// Training default: time reversal (spectrum restored) at 0.5, then
    /// RandAugment with two picks from the signals set.
    pub fn training() -> Self {
        AugmentPipeline {
            steps: vec![
                AugmentSpec::new(Transform::TimeReversal(TimeReversalParams::default()), 0.5),
                AugmentSpec::new(Transform::RandAugment(RandAugmentParams::default()), 1.0),
            ],
        }
    }

    /// Every transform with its default parameter ranges.
    pub fn defaults() -> Self {
        let steps = [
            Transform::Identity,
            Transform::TimeReversal(Default::default()),
            Transform::SpectralInversion,
            Transform::ChannelSwap,
            Transform::AmplitudeReversal,
            Transform::DropSamples(Default::default()),
            Transform::Quantize(Default::default()),
            Transform::MagnitudeRescale(Default::default()),
            Transform::Cutout(Default::default()),
            Transform::PatchShuffle(Default::default()),
            Transform::SignalRolloff(Default::default()),
            Transform::LoDrift(Default::default()),
            Transform::TimeVaryingNoise(Default::default()),
            Transform::Clip(Default::default()),
            Transform::AddSlope,
            Transform::RandomConvolve(Default::default()),
            Transform::GainDrift(Default::default()),
            Transform::Agc(Default::default()),
            Transform::RandAugment(Default::default()),
        ]
        .into_iter()
        .map(|t| AugmentSpec::new(t, 1.0))
        .collect();
        AugmentPipeline { steps }
    }

    pub fn apply(&self, frame: &ComplexFrame, rng: &mut RngStream) -> Result<ComplexFrame> {
        let mut out = frame.clone();
        for step in &self.steps {
            out = step.apply(&out, rng)?.0;
        }
        Ok(out)
    }
}
