use std::f64::consts::TAU;

use crate::classes::{class_info, ClassKind};
use crate::error::{Error, Result};
use crate::frame::ComplexSample;

/// Symbol alphabet of a linear modulation, normalized to unit mean power.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstellationTable {
    pub points: Vec<ComplexSample>,
    /// `log2(M)` when `M` is a power of two.
    pub bits_per_symbol: Option<u32>,
}

impl ConstellationTable {
    fn from_raw(raw: Vec<ComplexSample>) -> Self {
        let power = raw.iter().map(|p| p.norm_sqr()).sum::<f64>() / raw.len() as f64;
        let scale = 1.0 / power.sqrt();
        let m = raw.len();
        ConstellationTable {
            points: raw.into_iter().map(|p| p * scale).collect(),
            bits_per_symbol: m.is_power_of_two().then(|| m.trailing_zeros()),
        }
    }

    pub fn order(&self) -> usize {
        self.points.len()
    }

    /// Index of the point closest to `sample`.
    pub fn nearest(&self, sample: ComplexSample) -> usize {
        self.points
            .iter()
            .enumerate()
            .min_by(|a, b| {
                (a.1 - sample)
                    .norm_sqr()
                    .partial_cmp(&(b.1 - sample).norm_sqr())
                    .unwrap()
            })
            .map(|(i, _)| i)
            .unwrap_or(0)
    }
}

fn levels(count: usize, low: f64, high: f64) -> impl Iterator<Item = f64> {
    let step = (high - low) / (count - 1) as f64;
    (0..count).map(move |k| low + step * k as f64)
}

fn grid(cols: usize, rows: usize) -> Vec<ComplexSample> {
    let ys: Vec<f64> = levels(rows, -1.0, 1.0).collect();
    levels(cols, -1.0, 1.0)
        .flat_map(|x| ys.iter().map(move |&y| ComplexSample::new(x, y)))
        .collect()
}

/// Square grid of side `side` with a `side/6` square block removed from each
/// corner.
fn cross_grid(side: usize) -> Vec<ComplexSample> {
    let block = side / 6;
    let coords: Vec<f64> = levels(side, -1.0, 1.0).collect();
    let in_corner = |i: usize| i < block || i >= side - block;
    let mut points = Vec::with_capacity(side * side - 4 * block * block);
    for (i, &x) in coords.iter().enumerate() {
        for (j, &y) in coords.iter().enumerate() {
            if !(in_corner(i) && in_corner(j)) {
                points.push(ComplexSample::new(x, y));
            }
        }
    }
    points
}

/// Constellation points before power normalization.
pub fn raw_points(kind: ClassKind) -> Option<Vec<ComplexSample>> {
    let real = |v: f64| ComplexSample::new(v, 0.0);
    let points = match kind {
        ClassKind::Ask { order } => levels(order, -1.0, 1.0).map(real).collect(),
        ClassKind::Pam { order } => levels(order, 0.0, 1.0).map(real).collect(),
        ClassKind::Psk { order } => (0..order)
            .map(|k| ComplexSample::from_polar(1.0, TAU * k as f64 / order as f64))
            .collect(),
        ClassKind::Qam { order, cross: false } => {
            let side = (order as f64).sqrt().round() as usize;
            if side * side == order {
                grid(side, side)
            } else {
                // 32QAM: 8 x 4 rectangle filling the same box.
                let rows = 1usize << (order.trailing_zeros() / 2);
                grid(order / rows, rows)
            }
        }
        ClassKind::Qam { order, cross: true } => {
            let side = match order {
                32 => 6,
                128 => 12,
                512 => 24,
                _ => return None,
            };
            cross_grid(side)
        }
        ClassKind::Fsk { .. } | ClassKind::Ofdm { .. } => return None,
    };
    Some(points)
}

pub fn build_constellation(class_index: usize) -> Result<ConstellationTable> {
    let info = class_info(class_index)?;
    let raw = raw_points(info.kind).ok_or(Error::WrongFamily {
        index: info.index,
        name: info.name,
        expected: "constellation",
    })?;
    Ok(ConstellationTable::from_raw(raw))
}

/// Subcarrier alphabets used by OFDM.
pub(crate) fn constellation_for(kind: ClassKind) -> ConstellationTable {
    ConstellationTable::from_raw(raw_points(kind).expect("linear kind"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::CLASSES;

    fn c(re: f64, im: f64) -> ComplexSample {
        ComplexSample::new(re, im)
    }

    #[test]
    fn ook_and_bpsk_and_4ask() {
        let ook = raw_points(CLASSES[0].kind).unwrap();
        assert_eq!(ook, vec![c(0.0, 0.0), c(1.0, 0.0)]);

        let bpsk = build_constellation(1).unwrap();
        assert!((bpsk.points[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((bpsk.points[1] - c(-1.0, 0.0)).norm() < 1e-15);

        let ask4 = raw_points(CLASSES[3].kind).unwrap();
        let expect = [-1.0, -1.0 / 3.0, 1.0 / 3.0, 1.0];
        for (p, e) in ask4.iter().zip(expect) {
            assert!((p - c(e, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn every_linear_class_has_its_order_distinct_and_unit_power() {
        for info in CLASSES.iter().filter(|c| c.is_linear()) {
            let table = build_constellation(info.index).unwrap();
            assert_eq!(table.order(), info.order(), "{}", info.name);
            let power = table.points.iter().map(|p| p.norm_sqr()).sum::<f64>() / table.order() as f64;
            assert!((power - 1.0).abs() < 1e-12);
            for (i, a) in table.points.iter().enumerate() {
                for b in &table.points[i + 1..] {
                    assert!((a - b).norm() > 1e-6, "{} has duplicate points", info.name);
                }
            }
            let mean: ComplexSample = table.points.iter().sum::<ComplexSample>() / table.order() as f64;
            if info.family == crate::classes::Family::Pam {
                assert!(mean.re > 0.1, "{}", info.name);
            } else {
                assert!(mean.norm() < 1e-12, "{} mean {mean}", info.name);
            }
        }
    }

    #[test]
    fn cross_constellations_drop_corners() {
        let pts = raw_points(ClassKind::Qam { order: 32, cross: true }).unwrap();
        assert!(!pts.iter().any(|p| (p - c(1.0, 1.0)).norm() < 1e-12));
        assert!(pts.iter().any(|p| (p - c(1.0, 0.2)).norm() < 1e-12));
        let pts = raw_points(ClassKind::Qam {
            order: 512,
            cross: true,
        })
        .unwrap();
        assert_eq!(pts.len(), 512);
    }

    #[test]
    fn rectangular_32qam_is_8_by_4() {
        let pts = raw_points(ClassKind::Qam {
            order: 32,
            cross: false,
        })
        .unwrap();
        let mut re: Vec<i64> = pts.iter().map(|p| (p.re * 1e9).round() as i64).collect();
        let mut im: Vec<i64> = pts.iter().map(|p| (p.im * 1e9).round() as i64).collect();
        re.sort();
        re.dedup();
        im.sort();
        im.dedup();
        assert_eq!((re.len(), im.len()), (8, 4));
    }

    #[test]
    fn non_constellation_classes_are_rejected() {
        assert!(matches!(build_constellation(25), Err(Error::WrongFamily { .. })));
        assert!(matches!(build_constellation(41), Err(Error::WrongFamily { .. })));
        assert!(matches!(build_constellation(60), Err(Error::ClassOutOfRange(60))));
    }

    #[test]
    fn bits_per_symbol() {
        assert_eq!(build_constellation(24).unwrap().bits_per_symbol, Some(10));
        assert_eq!(build_constellation(0).unwrap().bits_per_symbol, Some(1));
    }
}
