use crate::classes::class_info;
use crate::dsp::{convolve_full, filter_same};
use crate::error::Result;
use crate::frame::{ComplexFrame, ComplexSample};
use crate::rng::RngStream;

use super::constellation::{build_constellation, ConstellationTable};
use super::pulse::{rrc_taps, RrcFilterSpec};
use super::{PulseShape, SignalDescriptor};

/// Samples per symbol of every constellation-based class.
pub const LINEAR_SPS: usize = 2;

/// A synthesized linear-modulation frame together with its symbol stream.
#[derive(Debug, Clone)]
pub struct LinearWaveform {
    pub frame: ComplexFrame,
    pub table: ConstellationTable,
    /// Transmitted symbol indices, including the warm-up symbols that fall
    /// before the first output sample.
    pub symbols: Vec<usize>,
    /// Index into `symbols` whose pulse peak is at output sample 0; symbol
    /// `first_symbol + j` peaks at sample `j * sps`.
    pub first_symbol: usize,
    pub samples_per_symbol: usize,
}

/// Pulse-shapes `symbols` and returns the steady-state window of `len`
/// samples (unnormalized). Returns the window and the index of the symbol
/// aligned with sample 0.
pub(crate) fn shape_symbols(
    points: &[ComplexSample],
    taps: &[f64],
    sps: usize,
    span: usize,
    len: usize,
) -> (Vec<ComplexSample>, usize) {
    let delay = (taps.len() - 1) / 2;
    let lead = span.div_ceil(2);
    let start = delay + lead * sps;
    debug_assert!(points.len() > (start + len - 1).div_ceil(sps));
    let mut upsampled = vec![ComplexSample::new(0.0, 0.0); points.len() * sps];
    for (k, &p) in points.iter().enumerate() {
        upsampled[k * sps] = p;
    }
    let full = convolve_full(&upsampled, taps);
    (full[start..start + len].to_vec(), lead)
}

/// Number of symbols `shape_symbols` needs for a `len`-sample window.
pub(crate) fn symbols_needed(taps_len: usize, sps: usize, span: usize, len: usize) -> usize {
    let start = (taps_len - 1) / 2 + span.div_ceil(2) * sps;
    (start + len - 1).div_ceil(sps) + 1
}

pub fn linear_waveform(class_index: usize, alpha: f64, len: usize, rng: &mut RngStream) -> Result<LinearWaveform> {
    let table = build_constellation(class_index)?;
    let spec = RrcFilterSpec::new(alpha, LINEAR_SPS);
    let taps = rrc_taps(&spec)?;
    let count = symbols_needed(taps.len(), LINEAR_SPS, spec.span_symbols, len);
    let symbols: Vec<usize> = (0..count).map(|_| rng.index(table.order())).collect();
    let points: Vec<ComplexSample> = symbols.iter().map(|&s| table.points[s]).collect();
    let (window, first_symbol) = shape_symbols(&points, &taps, LINEAR_SPS, spec.span_symbols, len);
    let frame = ComplexFrame::new(window).normalize_unit_power()?;
    Ok(LinearWaveform {
        frame,
        table,
        symbols,
        first_symbol,
        samples_per_symbol: LINEAR_SPS,
    })
}

/// Random symbols, RRC pulse shaping at 2 samples/symbol, unit power.
pub fn gen_linear_mod(
    class_index: usize,
    rng: &mut RngStream,
    alpha: f64,
    len: usize,
) -> Result<(ComplexFrame, SignalDescriptor)> {
    let info = class_info(class_index)?;
    let wave = linear_waveform(class_index, alpha, len, rng)?;
    let descriptor = SignalDescriptor::new(info, LINEAR_SPS as f64, PulseShape::Rrc { alpha });
    Ok((wave.frame, descriptor))
}

/// Output of [`demodulate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Demodulation {
    pub decided: Vec<usize>,
    pub transmitted: Vec<usize>,
    /// Largest distance of a recovered point from its transmitted point.
    pub worst_error: f64,
}

/// Matched filter, symbol-rate sampling, least-squares gain, then
/// nearest-point decisions.
pub fn demodulate(wave: &LinearWaveform, alpha: f64) -> Result<Demodulation> {
    let taps = rrc_taps(&RrcFilterSpec::new(alpha, wave.samples_per_symbol))?;
    let mf = filter_same(wave.frame.samples(), &taps);
    // Skip symbols whose matched-filter support crosses the frame edge.
    let guard = 8;
    let n_sym = wave.frame.len() / wave.samples_per_symbol;
    let idx: Vec<usize> = (guard..n_sym - guard).collect();
    let rx: Vec<ComplexSample> = idx.iter().map(|&j| mf[j * wave.samples_per_symbol]).collect();
    let tx: Vec<usize> = idx.iter().map(|&j| wave.symbols[wave.first_symbol + j]).collect();
    let num: ComplexSample = rx.iter().zip(&tx).map(|(r, &t)| wave.table.points[t].conj() * r).sum();
    let den: f64 = tx.iter().map(|&t| wave.table.points[t].norm_sqr()).sum();
    let gain = num / den;
    let recovered: Vec<ComplexSample> = rx.iter().map(|r| r / gain).collect();
    let worst = recovered
        .iter()
        .zip(&tx)
        .map(|(r, &t)| (r - wave.table.points[t]).norm())
        .fold(0.0, f64::max);
    let decided = recovered.iter().map(|&r| wave.table.nearest(r)).collect();
    Ok(Demodulation {
        decided,
        transmitted: tx,
        worst_error: worst,
    })
}
