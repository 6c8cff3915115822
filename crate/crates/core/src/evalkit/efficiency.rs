//! Path length relative to the optimum.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EfficiencyBand {
    Excellent,
    Acceptable,
    /// Between the acceptable and poor thresholds.
    Inefficient,
    Poor,
    /// Shorter than the optimum, which no legal track can be.
    Impossible,
}

impl EfficiencyBand {
    pub fn label(self) -> &'static str {
        match self {
            EfficiencyBand::Excellent => "excellent",
            EfficiencyBand::Acceptable => "acceptable",
            EfficiencyBand::Inefficient => "inefficient",
            EfficiencyBand::Poor => "poor",
            EfficiencyBand::Impossible => "impossible",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Efficiency {
    pub ratio: f64,
    pub score: f64,
    pub band: EfficiencyBand,
}

pub const EXCELLENT_MAX: f64 = 1.10;
pub const ACCEPTABLE_MAX: f64 = 1.30;
pub const POOR_MIN: f64 = 2.00;

/// Score 1 up to 1.1x, 0.5 at 1.3x, 0 from 2x; linear in between.
/// `optimal` of zero is treated as one.
pub fn path_efficiency_score(actual: usize, optimal: usize) -> Efficiency {
    let optimal = optimal.max(1);
    let r = actual as f64 / optimal as f64;
    if actual < optimal {
        return Efficiency { ratio: r, score: 0.0, band: EfficiencyBand::Impossible };
    }
    let (score, band) = if r <= EXCELLENT_MAX {
        (1.0, EfficiencyBand::Excellent)
    } else if r <= ACCEPTABLE_MAX {
        (1.0 - 0.5 * (r - EXCELLENT_MAX) / (ACCEPTABLE_MAX - EXCELLENT_MAX), EfficiencyBand::Acceptable)
    } else if r <= POOR_MIN {
        (0.5 * (POOR_MIN - r) / (POOR_MIN - ACCEPTABLE_MAX), EfficiencyBand::Inefficient)
    } else {
        (0.0, EfficiencyBand::Poor)
    };
    Efficiency { ratio: r, score, band }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn anchors() {
        let e = path_efficiency_score(21, 20);
        assert_eq!((e.band, e.score), (EfficiencyBand::Excellent, 1.0));
        let e = path_efficiency_score(13, 10);
        assert_eq!(e.band, EfficiencyBand::Acceptable);
        assert!((e.score - 0.5).abs() < 1e-12);
        let e = path_efficiency_score(25, 10);
        assert_eq!((e.band, e.score), (EfficiencyBand::Poor, 0.0));
        assert_eq!(path_efficiency_score(20, 10).score, 0.0);
        assert_eq!(path_efficiency_score(3, 4).band, EfficiencyBand::Impossible);
    }

    proptest! {
        #[test]
        fn non_increasing_in_length(opt in 1usize..60, a in 0usize..200, b in 0usize..200) {
            let (lo, hi) = (opt + a.min(b), opt + a.max(b));
            let (s_lo, s_hi) = (path_efficiency_score(lo, opt).score, path_efficiency_score(hi, opt).score);
            prop_assert!(s_hi <= s_lo + 1e-12);
            prop_assert!((0.0..=1.0).contains(&s_hi));
        }
    }
}
