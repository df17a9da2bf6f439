//! Two-signal mixing transforms with label bookkeeping.

use serde::{Deserialize, Serialize};

use crate::classes::NUM_CLASSES;
use crate::error::{Error, Result};
use crate::frame::{ComplexFrame, ComplexSample};
use crate::rng::RngStream;

/// Default MixUp level range in dB.
pub const MIXUP_ALPHA_DB: (f64, f64) = (3.0, 23.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SecondaryLabel {
    /// Share of the output power carried by the mixed-in signal.
    Mix { class_index: usize, weight: f64 },
    /// Fraction of the frame occupied by the pasted signal.
    Cut { class_index: usize, extent: f64 },
}

impl SecondaryLabel {
    pub fn class_index(&self) -> usize {
        match *self {
            SecondaryLabel::Mix { class_index, .. } | SecondaryLabel::Cut { class_index, .. } => class_index,
        }
    }

    pub fn weight(&self) -> f64 {
        match *self {
            SecondaryLabel::Mix { weight, .. } => weight,
            SecondaryLabel::Cut { extent, .. } => extent,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabelInfo {
    pub class_index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub secondary: Option<SecondaryLabel>,
}

impl LabelInfo {
    pub fn single(class_index: usize) -> Self {
        LabelInfo {
            class_index,
            secondary: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.class_index >= NUM_CLASSES {
            return Err(Error::ClassOutOfRange(self.class_index));
        }
        if let Some(s) = self.secondary {
            if s.class_index() >= NUM_CLASSES {
                return Err(Error::ClassOutOfRange(s.class_index()));
            }
            if !(0.0..=1.0).contains(&s.weight()) {
                return Err(Error::invalid("weight", format!("{} not in [0, 1]", s.weight())));
            }
        }
        Ok(())
    }

    /// Soft-label vector over all classes.
    pub fn soft(&self) -> [f64; NUM_CLASSES] {
        let mut v = [0.0; NUM_CLASSES];
        match self.secondary {
            None => v[self.class_index] = 1.0,
            Some(s) => {
                v[self.class_index] += 1.0 - s.weight();
                v[s.class_index()] += s.weight();
            }
        }
        v
    }
}

/// `y = x + 10^(-alpha_db/20) * other`. The secondary weight is the other
/// signal's share of the summed powers.
pub fn mixup(
    frame: &ComplexFrame,
    label: LabelInfo,
    other: (&ComplexFrame, LabelInfo),
    alpha_db: f64,
) -> Result<(ComplexFrame, LabelInfo)> {
    let (other_frame, other_label) = other;
    if other_frame.len() != frame.len() {
        return Err(Error::invalid("other", "frames must have equal length"));
    }
    if alpha_db.is_nan() {
        return Err(Error::invalid("alpha_db", "must not be NaN"));
    }
    if alpha_db == f64::INFINITY {
        return Ok((frame.clone(), label));
    }
    let g = 10f64.powf(-alpha_db / 20.0);
    let out: Vec<ComplexSample> = frame.iter().zip(other_frame.iter()).map(|(x, o)| x + o * g).collect();
    let px = frame.mean_power()?;
    let po = other_frame.mean_power()? * g * g;
    let weight = if px + po > 0.0 { po / (px + po) } else { 0.0 };
    let label = LabelInfo {
        class_index: label.class_index,
        secondary: Some(SecondaryLabel::Mix {
            class_index: other_label.class_index,
            weight,
        }),
    };
    Ok((ComplexFrame::new(out), label))
}

/// Draws a MixUp level from [`MIXUP_ALPHA_DB`].
pub fn random_mixup_alpha(rng: &mut RngStream) -> f64 {
    rng.uniform_range(MIXUP_ALPHA_DB.0, MIXUP_ALPHA_DB.1)
}

/// Pastes a random contiguous `alpha_frac * len` region of `other` into the
/// same positions of `frame`.
pub fn cutmix(
    frame: &ComplexFrame,
    label: LabelInfo,
    other: (&ComplexFrame, LabelInfo),
    alpha_frac: f64,
    rng: &mut RngStream,
) -> Result<(ComplexFrame, LabelInfo)> {
    let (other_frame, other_label) = other;
    if other_frame.len() != frame.len() {
        return Err(Error::invalid("other", "frames must have equal length"));
    }
    if !(0.0..=1.0).contains(&alpha_frac) {
        return Err(Error::invalid("alpha_frac", format!("{alpha_frac} not in [0, 1]")));
    }
    let len = frame.len();
    let dur = (alpha_frac * len as f64).round() as usize;
    if dur == 0 {
        return Ok((frame.clone(), label));
    }
    if dur == len {
        return Ok((other_frame.clone(), LabelInfo::single(other_label.class_index)));
    }
    let start = rng.index(len - dur + 1);
    let mut out = frame.samples().to_vec();
    out[start..start + dur].copy_from_slice(&other_frame.samples()[start..start + dur]);
    let label = LabelInfo {
        class_index: label.class_index,
        secondary: Some(SecondaryLabel::Cut {
            class_index: other_label.class_index,
            extent: dur as f64 / len as f64,
        }),
    };
    Ok((ComplexFrame::new(out), label))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modulators::gen_clean;

    #[test]
    fn mixup_examples() {
        let (a, _) = gen_clean(4, 4096, &mut RngStream::new(1)).unwrap();
        let (b, _) = gen_clean(30, 4096, &mut RngStream::new(2)).unwrap();
        let (la, lb) = (LabelInfo::single(4), LabelInfo::single(30));
        let (same, l) = mixup(&a, la, (&b, lb), f64::INFINITY).unwrap();
        assert_eq!(same, a);
        assert_eq!(l, la);
        let (mixed, l) = mixup(&a, la, (&b, lb), 0.0).unwrap();
        let p = mixed.mean_power().unwrap();
        assert!((p - 2.0).abs() < 0.1, "{p}");
        assert_eq!(l.class_index, 4);
        assert_eq!(l.secondary.unwrap().class_index(), 30);
        assert!((l.secondary.unwrap().weight() - 0.5).abs() < 1e-12);
        l.validate().unwrap();
        let soft = l.soft();
        assert!((soft.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mixup_alpha_draws() {
        let mut rng = RngStream::new(3);
        assert!((0..1000)
            .map(|_| random_mixup_alpha(&mut rng))
            .all(|a| (3.0..=23.0).contains(&a)));
    }

    #[test]
    fn cutmix_examples() {
        let (a, _) = gen_clean(1, 1024, &mut RngStream::new(1)).unwrap();
        let (b, _) = gen_clean(45, 1024, &mut RngStream::new(2)).unwrap();
        let (la, lb) = (LabelInfo::single(1), LabelInfo::single(45));
        let mut rng = RngStream::new(4);
        assert_eq!(cutmix(&a, la, (&b, lb), 0.0, &mut rng).unwrap(), (a.clone(), la));
        assert_eq!(cutmix(&a, la, (&b, lb), 1.0, &mut rng).unwrap(), (b.clone(), lb));
        let (c, l) = cutmix(&a, la, (&b, lb), 0.25, &mut rng).unwrap();
        assert_eq!(l.secondary.unwrap().weight(), 0.25);
        let from_b: Vec<usize> = (0..1024).filter(|&i| c.samples()[i] != a.samples()[i]).collect();
        assert!(from_b.len() <= 256);
        for i in 0..1024 {
            let v = c.samples()[i];
            assert!(v == a.samples()[i] || v == b.samples()[i]);
        }
        let first = from_b[0];
        assert!(from_b.iter().all(|&i| i < first + 256));
    }
}
