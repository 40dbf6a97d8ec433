//! Bundled fatigue dataset of 28 paired measurements.

use crate::estimation::SampleMatrix;

/// Pairs as printed in the original source.
pub const VOLLE_RAW: [(f64, f64); 28] = [
    (115.0, 175.0),
    (100.0, 115.0),
    (130.0, 160.0),
    (115.0, 180.0),
    (119.0, 143.0),
    (100.0, 150.0),
    (960.0, 132.0),
    (150.0, 115.0),
    (142.0, 870.0),
    (180.0, 125.0),
    (152.0, 122.0),
    (174.0, 119.0),
    (140.0, 100.0),
    (147.0, 840.0),
    (105.0, 700.0),
    (950.0, 600.0),
    (130.0, 600.0),
    (105.0, 800.0),
    (117.0, 650.0),
    (850.0, 400.0),
    (102.0, 450.0),
    (100.0, 960.0),
    (920.0, 640.0),
    (128.0, 860.0),
    (102.0, 122.0),
    (107.0, 730.0),
    (860.0, 580.0),
    (940.0, 580.0),
];

/// Printed values at or above this threshold carry a misplaced decimal point.
pub const CANONICAL_THRESHOLD: f64 = 400.0;

pub fn canonicalize(v: f64) -> f64 {
    if v >= CANONICAL_THRESHOLD {
        v / 10.0
    } else {
        v
    }
}

/// The dataset with the decimal-shift correction applied (or not, if `raw`).
pub fn volle(raw: bool) -> SampleMatrix {
    let rows = VOLLE_RAW
        .iter()
        .map(|&(x, y)| {
            if raw {
                vec![x, y]
            } else {
                vec![canonicalize(x), canonicalize(y)]
            }
        })
        .collect();
    SampleMatrix::new(rows).expect("bundled dataset is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summaries() {
        let s = volle(false);
        assert_eq!(s.n(), 28);
        let round = |x: f64| (x * 100.0).round() / 100.0;
        assert_eq!(round(s.s_bar()[0]), 118.14);
        assert_eq!(round(s.s_bar()[1]), 99.43);
        assert_eq!(round(s.r_bar()[0]), 113.40);
        assert_eq!(round(s.r_bar()[1]), 84.61);
        assert_eq!(s.row(6), vec![96.0, 132.0]);
        assert_eq!(volle(false), volle(false));
        assert_eq!(volle(true).row(6), vec![960.0, 132.0]);
    }
}
