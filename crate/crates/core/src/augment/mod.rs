//! Signal-domain data augmentation.

pub mod basic;
pub mod extra;
pub mod features;
pub mod mix;
pub mod pipeline;

pub use basic::{
    amplitude_reversal, channel_swap, cutout, drop_samples, fill_regions, magnitude_rescale, patch_shuffle, quantize,
    quantize_in_range, spectral_inversion, time_reversal, CutoutFill, DropFill, Rounding,
};
pub use extra::{
    add_slope, agc, agc_trace, clip, gain_drift, lo_drift, random_convolve, signal_rolloff, time_varying_noise,
    AgcParams, RolloffSide,
};
pub use features::{from_iq_2channel, to_features, Features, Representation};
pub use mix::{cutmix, mixup, random_mixup_alpha, LabelInfo, SecondaryLabel};
pub use pipeline::{rand_augment, rand_augment_set, AugmentPipeline, AugmentSpec, Transform};
