use anyhow::{bail, Result};

use sigforge::dataset::ExampleMeta;
use sigforge::dsp::{filter_same, rational_approx, Resampler};
use sigforge::modulators::{rrc_taps, RrcFilterSpec, LINEAR_SPS};
use sigforge::{ComplexFrame, ComplexSample, ImpairmentStep, PulseShape};

/// Matched-filtered IQ at one point per symbol. The frame is first brought
/// back to 2 samples per symbol (undoing any recorded resampling), then the
/// decimation phase with the most energy is kept.
pub fn symbol_points(frame: &ComplexFrame, meta: &ExampleMeta) -> Result<Vec<ComplexSample>> {
    let PulseShape::Rrc { alpha } = meta.pulse else {
        bail!(
            "{} is not a linear modulation; no constellation to show",
            meta.class_name
        );
    };
    let rate = meta
        .impairments
        .steps
        .iter()
        .find_map(|s| match s {
            ImpairmentStep::Resample { rate, .. } => Some(*rate),
            _ => None,
        })
        .unwrap_or(1.0);
    let sps = meta.samples_per_symbol * rate;
    let target = LINEAR_SPS as f64;
    let samples = if (sps - target).abs() > 1e-12 {
        let (up, down) = rational_approx(target / sps, 1024);
        Resampler::new(up, down).process(frame.samples())
    } else {
        frame.samples().to_vec()
    };
    let taps = rrc_taps(&RrcFilterSpec::new(alpha, LINEAR_SPS))?;
    let filtered = filter_same(&samples, &taps);
    let energy = |phase: usize| {
        filtered
            .iter()
            .skip(phase)
            .step_by(LINEAR_SPS)
            .map(|s| s.norm_sqr())
            .sum::<f64>()
    };
    let best = (0..LINEAR_SPS)
        .max_by(|&a, &b| energy(a).total_cmp(&energy(b)))
        .unwrap_or(0);
    Ok(filtered.into_iter().skip(best).step_by(LINEAR_SPS).collect())
}
