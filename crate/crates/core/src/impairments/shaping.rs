//! Randomized pulse shaping applied at generation time for impaired data.

use crate::classes::{class_info, ClassKind};
use crate::dsp::{filter_same, lowpass_taps, rational_approx, Resampler};
use crate::error::{Error, Result};
use crate::frame::{ComplexFrame, ComplexSample};
use crate::modulators::fsk::fsk_waveform;
use crate::modulators::{gen_linear_mod, gen_ofdm, FskSpec, OfdmSpec, PulseShape, SignalDescriptor};
use crate::rng::RngStream;

use super::ops::RESAMPLE_MAX_DENOMINATOR;

pub const RANDOM_RRC_ALPHA: (f64, f64) = (0.15, 0.60);
pub const RANDOM_GAUSSIAN_BT: (f64, f64) = (0.1, 0.5);
/// Low-pass cutoff range for unshaped FSK/MSK, cycles/sample
/// (1.25/8 to 3.75/8).
pub const RANDOM_FSK_CUTOFF: (f64, f64) = (0.15625, 0.46875);
pub const FSK_LOWPASS_TAPS: usize = 129;

/// Draws the RRC roll-off for a constellation class.
pub fn random_pulse_shape_linear(class_index: usize, rng: &mut RngStream) -> Result<f64> {
    let info = class_info(class_index)?;
    if !info.is_linear() {
        return Err(Error::WrongFamily {
            index: info.index,
            name: info.name,
            expected: "constellation",
        });
    }
    Ok(rng.uniform_range(RANDOM_RRC_ALPHA.0, RANDOM_RRC_ALPHA.1))
}

pub fn random_pulse_shape_gaussian(rng: &mut RngStream) -> f64 {
    rng.uniform_range(RANDOM_GAUSSIAN_BT.0, RANDOM_GAUSSIAN_BT.1)
}

pub fn random_fsk_cutoff(rng: &mut RngStream) -> f64 {
    rng.uniform_range(RANDOM_FSK_CUTOFF.0, RANDOM_FSK_CUTOFF.1)
}

/// Output samples per input sample that maps a `cutoff` band edge onto
/// quarter-rate, i.e. the retained band onto half-band occupancy.
pub fn fsk_resample_ratio(cutoff: f64) -> (u64, u64) {
    rational_approx(cutoff / 0.25, RESAMPLE_MAX_DENOMINATOR)
}

fn lowpass_then_resample(samples: &[ComplexSample], cutoff: f64) -> (Vec<ComplexSample>, u64, u64) {
    let filtered = filter_same(samples, &lowpass_taps(cutoff, FSK_LOWPASS_TAPS));
    let (up, down) = fsk_resample_ratio(cutoff);
    (Resampler::new(up, down).process(&filtered), up, down)
}

/// Low-pass filters an 8 sample/symbol FSK/MSK frame at `cutoff` and
/// resamples by `cutoff / 0.25`, fitting the result to `out_len` samples.
/// Returns the frame and the applied rate.
pub fn fsk_lpf_resample(frame: &ComplexFrame, cutoff: f64, out_len: usize) -> Result<(ComplexFrame, f64)> {
    if !(cutoff > 0.0 && cutoff < 0.5) {
        return Err(Error::invalid("cutoff", format!("{cutoff} not in (0, 0.5)")));
    }
    let (out, up, down) = lowpass_then_resample(frame.samples(), cutoff);
    Ok((ComplexFrame::new(out).fit_to_len(out_len), up as f64 / down as f64))
}

/// Samples discarded on each side of a resampled FSK stream so filter edge
/// transients never reach the output.
const FSK_MARGIN: usize = 128;

/// Generates a class with the impaired-dataset pulse-shaping randomization:
/// RRC roll-off for constellations, BT for GFSK/GMSK, low-pass + resample
/// for FSK/MSK. OFDM uses its clean generator.
pub fn gen_randomized(class_index: usize, len: usize, rng: &mut RngStream) -> Result<(ComplexFrame, SignalDescriptor)> {
    let info = class_info(class_index)?;
    match info.kind {
        ClassKind::Ask { .. } | ClassKind::Pam { .. } | ClassKind::Psk { .. } | ClassKind::Qam { .. } => {
            let alpha = random_pulse_shape_linear(class_index, rng)?;
            gen_linear_mod(class_index, rng, alpha, len)
        }
        ClassKind::Fsk { variant, .. } if variant.is_gaussian() => {
            let bt = random_pulse_shape_gaussian(rng);
            let spec = FskSpec::for_class(info)?.with_bt(bt);
            crate::modulators::gen_fsk(info, &spec, len, rng)
        }
        ClassKind::Fsk { .. } => {
            let cutoff = random_fsk_cutoff(rng);
            let spec = FskSpec::for_class(info)?;
            let (up, down) = fsk_resample_ratio(cutoff);
            let src_len = ((len + 2 * FSK_MARGIN) as u64 * down).div_ceil(up) as usize + 1;
            let wave = fsk_waveform(&spec, src_len, rng)?;
            let (resampled, _, _) = lowpass_then_resample(wave.frame.samples(), cutoff);
            let frame = ComplexFrame::new(resampled[FSK_MARGIN..FSK_MARGIN + len].to_vec()).normalize_unit_power()?;
            let rate = up as f64 / down as f64;
            let descriptor = SignalDescriptor::new(
                info,
                spec.samples_per_symbol as f64 * rate,
                PulseShape::LowpassResample { cutoff, rate },
            );
            Ok((frame, descriptor))
        }
        ClassKind::Ofdm { .. } => {
            let spec = OfdmSpec::random_for(info, rng)?;
            gen_ofdm(info, &spec, len, rng)
        }
    }
}
