//! Shared fixtures for the benchmarks.

use sigforge::{gen_clean, ComplexFrame, RngStream, SignalDescriptor};

/// BPSK, 1024QAM, 4ASK, 8PAM, 2FSK, 2GMSK and OFDM-256.
pub const REPRESENTATIVE_CLASSES: [usize; 7] = [1, 24, 3, 5, 25, 28, 45];

pub fn clean_frame(class_index: usize, len: usize, seed: u64) -> (ComplexFrame, SignalDescriptor) {
    gen_clean(class_index, len, &mut RngStream::new(seed)).expect("valid class")
}
