//! The 53 modulation classes and their family membership.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const NUM_CLASSES: usize = 53;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Family {
    Ask,
    Pam,
    Psk,
    Qam,
    Fsk,
    Ofdm,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Ask => "ASK",
            Family::Pam => "PAM",
            Family::Psk => "PSK",
            Family::Qam => "QAM",
            Family::Fsk => "FSK",
            Family::Ofdm => "OFDM",
        }
    }

    /// Constellation-based single-carrier families.
    pub fn is_linear(self) -> bool {
        matches!(self, Family::Ask | Family::Pam | Family::Psk | Family::Qam)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FskVariant {
    Fsk,
    Gfsk,
    Msk,
    Gmsk,
}

impl FskVariant {
    pub fn is_gaussian(self) -> bool {
        matches!(self, FskVariant::Gfsk | FskVariant::Gmsk)
    }

    /// Modulation index: 1.0 for FSK/GFSK, 0.5 for the minimum-shift variants.
    pub fn mod_index(self) -> f64 {
        match self {
            FskVariant::Fsk | FskVariant::Gfsk => 1.0,
            FskVariant::Msk | FskVariant::Gmsk => 0.5,
        }
    }

    pub fn samples_per_symbol(self) -> usize {
        if self.is_gaussian() {
            2
        } else {
            8
        }
    }
}

/// Generation recipe of a class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassKind {
    Ask { order: usize },
    Pam { order: usize },
    Psk { order: usize },
    Qam { order: usize, cross: bool },
    Fsk { order: usize, variant: FskVariant },
    Ofdm { subcarriers: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassInfo {
    pub index: usize,
    pub name: &'static str,
    pub family: Family,
    pub kind: ClassKind,
}

use ClassKind::*;
use FskVariant::{Gfsk, Gmsk, Msk};

const fn info(index: usize, name: &'static str, family: Family, kind: ClassKind) -> ClassInfo {
    ClassInfo {
        index,
        name,
        family,
        kind,
    }
}

pub static CLASSES: [ClassInfo; NUM_CLASSES] = [
    info(0, "OOK", Family::Pam, Pam { order: 2 }),
    info(1, "BPSK", Family::Psk, Psk { order: 2 }),
    info(2, "4PAM", Family::Pam, Pam { order: 4 }),
    info(3, "4ASK", Family::Ask, Ask { order: 4 }),
    info(4, "QPSK", Family::Psk, Psk { order: 4 }),
    info(5, "8PAM", Family::Pam, Pam { order: 8 }),
    info(6, "8ASK", Family::Ask, Ask { order: 8 }),
    info(7, "8PSK", Family::Psk, Psk { order: 8 }),
    info(
        8,
        "16QAM",
        Family::Qam,
        Qam {
            order: 16,
            cross: false,
        },
    ),
    info(9, "16PAM", Family::Pam, Pam { order: 16 }),
    info(10, "16ASK", Family::Ask, Ask { order: 16 }),
    info(11, "16PSK", Family::Psk, Psk { order: 16 }),
    info(
        12,
        "32QAM",
        Family::Qam,
        Qam {
            order: 32,
            cross: false,
        },
    ),
    info(13, "32QAM_Cross", Family::Qam, Qam { order: 32, cross: true }),
    info(14, "32PAM", Family::Pam, Pam { order: 32 }),
    info(15, "32ASK", Family::Ask, Ask { order: 32 }),
    info(16, "32PSK", Family::Psk, Psk { order: 32 }),
    info(
        17,
        "64QAM",
        Family::Qam,
        Qam {
            order: 64,
            cross: false,
        },
    ),
    info(18, "64PAM", Family::Pam, Pam { order: 64 }),
    info(19, "64ASK", Family::Ask, Ask { order: 64 }),
    info(20, "64PSK", Family::Psk, Psk { order: 64 }),
    info(
        21,
        "128QAM_Cross",
        Family::Qam,
        Qam {
            order: 128,
            cross: true,
        },
    ),
    info(
        22,
        "256QAM",
        Family::Qam,
        Qam {
            order: 256,
            cross: false,
        },
    ),
    info(
        23,
        "512QAM_Cross",
        Family::Qam,
        Qam {
            order: 512,
            cross: true,
        },
    ),
    info(
        24,
        "1024QAM",
        Family::Qam,
        Qam {
            order: 1024,
            cross: false,
        },
    ),
    info(
        25,
        "2FSK",
        Family::Fsk,
        Fsk {
            order: 2,
            variant: FskVariant::Fsk,
        },
    ),
    info(
        26,
        "2GFSK",
        Family::Fsk,
        Fsk {
            order: 2,
            variant: Gfsk,
        },
    ),
    info(27, "2MSK", Family::Fsk, Fsk { order: 2, variant: Msk }),
    info(
        28,
        "2GMSK",
        Family::Fsk,
        Fsk {
            order: 2,
            variant: Gmsk,
        },
    ),
    info(
        29,
        "4FSK",
        Family::Fsk,
        Fsk {
            order: 4,
            variant: FskVariant::Fsk,
        },
    ),
    info(
        30,
        "4GFSK",
        Family::Fsk,
        Fsk {
            order: 4,
            variant: Gfsk,
        },
    ),
    info(31, "4MSK", Family::Fsk, Fsk { order: 4, variant: Msk }),
    info(
        32,
        "4GMSK",
        Family::Fsk,
        Fsk {
            order: 4,
            variant: Gmsk,
        },
    ),
    info(
        33,
        "8FSK",
        Family::Fsk,
        Fsk {
            order: 8,
            variant: FskVariant::Fsk,
        },
    ),
    info(
        34,
        "8GFSK",
        Family::Fsk,
        Fsk {
            order: 8,
            variant: Gfsk,
        },
    ),
    info(35, "8MSK", Family::Fsk, Fsk { order: 8, variant: Msk }),
    info(
        36,
        "8GMSK",
        Family::Fsk,
        Fsk {
            order: 8,
            variant: Gmsk,
        },
    ),
    info(
        37,
        "16FSK",
        Family::Fsk,
        Fsk {
            order: 16,
            variant: FskVariant::Fsk,
        },
    ),
    info(
        38,
        "16GFSK",
        Family::Fsk,
        Fsk {
            order: 16,
            variant: Gfsk,
        },
    ),
    info(
        39,
        "16MSK",
        Family::Fsk,
        Fsk {
            order: 16,
            variant: Msk,
        },
    ),
    info(
        40,
        "16GMSK",
        Family::Fsk,
        Fsk {
            order: 16,
            variant: Gmsk,
        },
    ),
    info(41, "OFDM-64", Family::Ofdm, Ofdm { subcarriers: 64 }),
    info(42, "OFDM-72", Family::Ofdm, Ofdm { subcarriers: 72 }),
    info(43, "OFDM-128", Family::Ofdm, Ofdm { subcarriers: 128 }),
    info(44, "OFDM-180", Family::Ofdm, Ofdm { subcarriers: 180 }),
    info(45, "OFDM-256", Family::Ofdm, Ofdm { subcarriers: 256 }),
    info(46, "OFDM-300", Family::Ofdm, Ofdm { subcarriers: 300 }),
    info(47, "OFDM-512", Family::Ofdm, Ofdm { subcarriers: 512 }),
    info(48, "OFDM-600", Family::Ofdm, Ofdm { subcarriers: 600 }),
    info(49, "OFDM-900", Family::Ofdm, Ofdm { subcarriers: 900 }),
    info(50, "OFDM-1024", Family::Ofdm, Ofdm { subcarriers: 1024 }),
    info(51, "OFDM-1200", Family::Ofdm, Ofdm { subcarriers: 1200 }),
    info(52, "OFDM-2048", Family::Ofdm, Ofdm { subcarriers: 2048 }),
];

pub fn class_info(index: usize) -> Result<&'static ClassInfo> {
    CLASSES.get(index).ok_or(Error::ClassOutOfRange(index))
}

pub fn class_by_name(name: &str) -> Option<&'static ClassInfo> {
    CLASSES.iter().find(|c| c.name.eq_ignore_ascii_case(name))
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Family::Ask,
            Family::Pam,
            Family::Psk,
            Family::Qam,
            Family::Fsk,
            Family::Ofdm,
        ]
        .into_iter()
        .find(|f| f.name().eq_ignore_ascii_case(s))
        .ok_or_else(|| Error::invalid("family", s))
    }
}

impl ClassInfo {
    /// Number of distinct symbols of the class (subcarriers for OFDM).
    pub fn order(&self) -> usize {
        match self.kind {
            Ask { order } | Pam { order } | Psk { order } | Qam { order, .. } | Fsk { order, .. } => order,
            Ofdm { subcarriers } => subcarriers,
        }
    }

    pub fn is_linear(&self) -> bool {
        self.family.is_linear()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indices_are_positional() {
        for (i, c) in CLASSES.iter().enumerate() {
            assert_eq!(c.index, i);
        }
    }

    #[test]
    fn family_sizes() {
        let count = |f: Family| CLASSES.iter().filter(|c| c.family == f).count();
        assert_eq!(count(Family::Ask), 5);
        assert_eq!(count(Family::Pam), 6);
        assert_eq!(count(Family::Psk), 6);
        assert_eq!(count(Family::Qam), 8);
        assert_eq!(count(Family::Fsk), 16);
        assert_eq!(count(Family::Ofdm), 12);
        assert_eq!(CLASSES.iter().filter(|c| c.is_linear()).count(), 25);
    }

    #[test]
    fn lookup() {
        assert_eq!(class_by_name("ook").unwrap().index, 0);
        assert_eq!(class_by_name("OFDM-256").unwrap().index, 45);
        assert!(class_info(53).is_err());
        assert_eq!("qam".parse::<Family>().unwrap(), Family::Qam);
    }
}
