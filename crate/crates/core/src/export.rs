//! Plain-text and image exports of measurements.

use std::io::Write;

use crate::error::Result;
use crate::frame::ComplexSample;
use crate::measure::{PsdEstimate, Spectrogram};

/// One `frequency,dB` line per bin, no header.
pub fn write_psd_csv<W: Write>(psd: &PsdEstimate, mut out: W) -> Result<()> {
    for (f, d) in psd.frequencies.iter().zip(&psd.density_db) {
        writeln!(out, "{f},{d}")?;
    }
    Ok(())
}

/// One `re,im` line per point, no header.
pub fn write_iq_csv<W: Write>(points: &[ComplexSample], mut out: W) -> Result<()> {
    for p in points {
        writeln!(out, "{},{}", p.re, p.im)?;
    }
    Ok(())
}

/// Binary 8-bit PGM (P5): time runs left to right, frequency increases
/// upwards, the dB range is mapped linearly onto 0..=255.
pub fn write_spectrogram_pgm<W: Write>(spec: &Spectrogram, mut out: W) -> Result<()> {
    let (lo, hi) = spec
        .data
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let span = if hi > lo { hi - lo } else { 1.0 };
    write!(out, "P5\n{} {}\n255\n", spec.num_frames, spec.num_freqs)?;
    let mut pixels = Vec::with_capacity(spec.data.len());
    for f in (0..spec.num_freqs).rev() {
        for &v in spec.row(f) {
            pixels.push(((v - lo) / span * 255.0).round().clamp(0.0, 255.0) as u8);
        }
    }
    out.write_all(&pixels)?;
    Ok(())
}
