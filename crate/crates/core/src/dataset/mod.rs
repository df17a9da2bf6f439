//! Dataset variants, example planning and generation, and the on-disk
//! shard format.
//!
//! A dataset directory holds:
//!
//! * `manifest.json`: config echo, shard list, per-class counts, digests.
//! * `shard-NNNNN.iq`: little-endian `f32`, interleaved `re, im`,
//!   frame-major, no header.
//! * `shard-NNNNN.meta.jsonl`: one [`ExampleMeta`] JSON object per line,
//!   in the same order as the frames.
//!
//! Examples are assigned to classes round-robin (`index mod 53`) and each
//! draws from its own stream `derive_stream(seed, index)`, so every example
//! is a pure function of the config and its index.

mod reader;
mod validate;
mod writer;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classes::{class_info, Family, NUM_CLASSES};
use crate::error::{Error, Result};
use crate::frame::{ComplexFrame, DEFAULT_FRAME_LEN};
use crate::impairments::{apply_impairment_chain, gen_randomized, ImpairmentProfile, ImpairmentRecord};
use crate::modulators::{gen_clean, PulseShape, SignalDescriptor};
use crate::rng::{derive_stream, RngStream};

pub use reader::{load_manifest, read, read_example, verify_digests, DatasetReader};
pub use validate::{validate, CheckResult, ValidationReport};
pub use writer::{digest_files, write_shards, write_shards_with, WriteOptions};

pub const FORMAT_VERSION: u32 = 1;
pub const DEFAULT_SHARD_SIZE: usize = 4096;
pub const MANIFEST_FILE: &str = "manifest.json";
/// Bytes per stored complex sample.
pub const SAMPLE_BYTES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    CleanTrain,
    CleanVal,
    ImpairedTrain,
    ImpairedVal,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::CleanTrain,
        Variant::CleanVal,
        Variant::ImpairedTrain,
        Variant::ImpairedVal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::CleanTrain => "clean-train",
            Variant::CleanVal => "clean-val",
            Variant::ImpairedTrain => "impaired-train",
            Variant::ImpairedVal => "impaired-val",
        }
    }

    pub fn is_impaired(self) -> bool {
        matches!(self, Variant::ImpairedTrain | Variant::ImpairedVal)
    }

    /// Conventional seed of each variant, so variants never share streams.
    pub fn default_seed(self) -> u64 {
        match self {
            Variant::CleanTrain => 1,
            Variant::CleanVal => 2,
            Variant::ImpairedTrain => 3,
            Variant::ImpairedVal => 4,
        }
    }

    /// Full-scale example count of the published variant.
    pub fn full_scale_count(self) -> usize {
        match self {
            Variant::CleanTrain => 1_000_000,
            Variant::CleanVal => 106_000,
            Variant::ImpairedTrain => 5_300_000,
            Variant::ImpairedVal => 106_000,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::UnknownVariant(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetConfig {
    pub variant: Variant,
    /// Total number of examples.
    pub num_examples: u64,
    pub dataset_seed: u64,
    pub frame_len: usize,
    /// Used by impaired variants only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub impairments: Option<ImpairmentProfile>,
    pub shard_size: usize,
}

impl DatasetConfig {
    pub fn new(variant: Variant, num_examples: u64, dataset_seed: u64) -> Self {
        DatasetConfig {
            variant,
            num_examples,
            dataset_seed,
            frame_len: DEFAULT_FRAME_LEN,
            impairments: variant.is_impaired().then(ImpairmentProfile::default),
            shard_size: DEFAULT_SHARD_SIZE,
        }
    }

    pub fn with_examples_per_class(variant: Variant, examples_per_class: u64, dataset_seed: u64) -> Self {
        DatasetConfig::new(variant, examples_per_class * NUM_CLASSES as u64, dataset_seed)
    }

    pub fn with_frame_len(mut self, frame_len: usize) -> Self {
        self.frame_len = frame_len;
        self
    }

    pub fn with_shard_size(mut self, shard_size: usize) -> Self {
        self.shard_size = shard_size;
        self
    }

    /// Examples of each class when the total is a multiple of 53.
    pub fn examples_per_class(&self) -> Option<u64> {
        self.num_examples
            .is_multiple_of(NUM_CLASSES as u64)
            .then_some(self.num_examples / NUM_CLASSES as u64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.frame_len == 0 {
            return Err(Error::invalid("frame_len", "must be positive"));
        }
        if self.shard_size == 0 {
            return Err(Error::invalid("shard_size", "must be positive"));
        }
        if let Some(p) = &self.impairments {
            p.validate()?;
        }
        Ok(())
    }

    fn profile(&self) -> ImpairmentProfile {
        self.impairments.clone().unwrap_or_default()
    }
}

/// One planned example.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlanItem {
    pub index: u64,
    pub class_index: usize,
    pub stream: RngStream,
}

impl PlanItem {
    pub fn new(dataset_seed: u64, index: u64) -> Self {
        PlanItem {
            index,
            class_index: (index % NUM_CLASSES as u64) as usize,
            stream: derive_stream(dataset_seed, index),
        }
    }
}

/// Round-robin class assignment with per-index streams.
pub fn plan(config: &DatasetConfig) -> impl Iterator<Item = PlanItem> + '_ {
    (0..config.num_examples).map(move |i| PlanItem::new(config.dataset_seed, i))
}

/// Metadata stored next to every frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleMeta {
    pub index: u64,
    pub class_index: usize,
    pub class_name: String,
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<f64>,
    pub samples_per_symbol: f64,
    pub pulse: PulseShape,
    pub impairments: ImpairmentRecord,
    /// Key of the example's stream; generation starts at counter 0.
    pub rng_key: u64,
}

impl ExampleMeta {
    pub fn descriptor(&self) -> SignalDescriptor {
        SignalDescriptor {
            class_index: self.class_index,
            class_name: self.class_name.clone(),
            family: self.family,
            samples_per_symbol: self.samples_per_symbol,
            snr_db: self.snr_db,
            pulse: self.pulse.clone(),
        }
    }
}

/// Clean frame of an example before impairments.
fn clean_part(item: &PlanItem, config: &DatasetConfig) -> Result<(ComplexFrame, SignalDescriptor, RngStream)> {
    let mut rng = item.stream;
    let mut gen_rng = rng.fork();
    let imp_rng = rng.fork();
    let (frame, desc) = if config.variant.is_impaired() {
        gen_randomized(item.class_index, config.frame_len, &mut gen_rng)?
    } else {
        gen_clean(item.class_index, config.frame_len, &mut gen_rng)?
    };
    Ok((frame, desc, imp_rng))
}

/// Clean frame and descriptor regenerated for a stored example.
pub fn regenerate_clean(meta: &ExampleMeta, config: &DatasetConfig) -> Result<(ComplexFrame, SignalDescriptor)> {
    let item = PlanItem {
        index: meta.index,
        class_index: meta.class_index,
        stream: RngStream::new(meta.rng_key),
    };
    let (frame, desc, _) = clean_part(&item, config)?;
    Ok((frame, desc))
}

/// Generates one example. Clean variants stop after synthesis; impaired
/// variants use randomized pulse shaping followed by the impairment chain.
pub fn generate_example(item: &PlanItem, config: &DatasetConfig) -> Result<(ComplexFrame, ExampleMeta)> {
    class_info(item.class_index)?;
    let (clean, mut desc, mut imp_rng) = clean_part(item, config)?;
    let (frame, record) = if config.variant.is_impaired() {
        apply_impairment_chain(&clean, &desc, &config.profile(), &mut imp_rng)?
    } else {
        (clean, ImpairmentRecord::default())
    };
    desc.snr_db = record.target_esn0_db;
    let meta = ExampleMeta {
        index: item.index,
        class_index: desc.class_index,
        class_name: desc.class_name,
        family: desc.family,
        snr_db: desc.snr_db,
        samples_per_symbol: desc.samples_per_symbol,
        pulse: desc.pulse,
        impairments: record,
        rng_key: item.stream.key,
    };
    Ok((frame, meta))
}

/// Regenerates a stored example from its metadata alone.
pub fn replay_meta(meta: &ExampleMeta, config: &DatasetConfig) -> Result<ComplexFrame> {
    let item = PlanItem {
        index: meta.index,
        class_index: meta.class_index,
        stream: RngStream::new(meta.rng_key),
    };
    let (clean, _, _) = clean_part(&item, config)?;
    crate::impairments::replay(&meta.impairments, &clean)
}

/// Frame quantized to the stored `f32` precision.
pub fn to_stored(frame: &ComplexFrame) -> Vec<f32> {
    frame.iter().flat_map(|s| [s.re as f32, s.im as f32]).collect()
}

pub fn encode_frame(frame: &ComplexFrame, out: &mut Vec<u8>) {
    for s in frame.iter() {
        out.extend_from_slice(&(s.re as f32).to_le_bytes());
        out.extend_from_slice(&(s.im as f32).to_le_bytes());
    }
}

pub fn decode_frame(bytes: &[u8]) -> ComplexFrame {
    let f = |b: &[u8]| f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64;
    ComplexFrame::new(
        bytes
            .chunks_exact(SAMPLE_BYTES)
            .map(|c| crate::frame::ComplexSample::new(f(&c[..4]), f(&c[4..])))
            .collect(),
    )
}

/// One shard listing in the manifest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShardInfo {
    pub index: usize,
    pub iq_file: String,
    pub meta_file: String,
    pub start: u64,
    pub count: u64,
    pub iq_sha256: String,
    pub meta_sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub format_version: u32,
    pub config: DatasetConfig,
    pub total_examples: u64,
    pub class_counts: Vec<u64>,
    pub shards: Vec<ShardInfo>,
    /// SHA-256 over every shard's `.iq` then `.meta.jsonl` bytes, in shard order.
    pub digest: String,
}

pub fn shard_names(index: usize) -> (String, String) {
    (format!("shard-{index:05}.iq"), format!("shard-{index:05}.meta.jsonl"))
}

/// Per-class counts implied by round-robin assignment.
pub fn expected_class_counts(num_examples: u64) -> Vec<u64> {
    let n = NUM_CLASSES as u64;
    (0..n)
        .map(|c| num_examples / n + u64::from(c < num_examples % n))
        .collect()
}
