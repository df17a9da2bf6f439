//! Deterministic synthetic RF signal engine for the 53-class Sig53
//! modulation dataset.

pub mod augment;
pub mod classes;
pub mod dataset;
pub mod dsp;
pub mod error;
pub mod export;
pub mod frame;
pub mod impairments;
pub mod measure;
pub mod modulators;
pub mod rng;
pub mod server;

pub use classes::{class_info, ClassInfo, ClassKind, Family, FskVariant, CLASSES, NUM_CLASSES};
pub use error::{Error, Result};
pub use frame::{mean_power, ComplexFrame, ComplexSample, DEFAULT_FRAME_LEN};
pub use impairments::{apply_impairment_chain, replay, ImpairmentProfile, ImpairmentRecord, ImpairmentStep};
pub use modulators::{gen_clean, PulseShape, SignalDescriptor};
pub use rng::{derive_stream, RngStream};
