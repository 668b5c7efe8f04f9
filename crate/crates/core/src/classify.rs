//! Local complexity on the invariant grayscale and the three-way region split.

use crate::error::{Error, Result};
use crate::image::{GrayImage, TraversalRegion};

/// Population variance of a pixel and its four neighbours, floored and
/// capped at 255 so thresholds fit in a byte.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Delta(pub u8);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionClass {
    Smooth,
    Normal,
    Complex,
}

/// `floor(var)` of five samples, divide-by-5 variance, capped at 255.
#[inline]
pub fn variance5(v: [i32; 5]) -> Delta {
    let sum: i64 = v.iter().map(|&x| x as i64).sum();
    let sq: i64 = v.iter().map(|&x| (x as i64) * (x as i64)).sum();
    // var = (5*sq - sum^2) / 25
    let var = (5 * sq - sum * sum) / 25;
    Delta(var.min(255) as u8)
}

#[inline]
pub(crate) fn delta_unchecked(gray: &GrayImage, i: usize, j: usize) -> Delta {
    let g = |a: usize, b: usize| gray.get(a, b) as i32;
    variance5([g(i, j), g(i - 1, j), g(i + 1, j), g(i, j - 1), g(i, j + 1)])
}

/// Complexity of unit `(i, j)`; the position must be inside the traversal region.
pub fn delta(gray: &GrayImage, i: usize, j: usize) -> Result<Delta> {
    let region = TraversalRegion::new(gray.width(), gray.height())?;
    if !region.contains(i, j) {
        return Err(Error::OutOfRegion(i, j));
    }
    Ok(delta_unchecked(gray, i, j))
}

/// `Δ <= t1` is smooth, `t1 < Δ <= t2` normal, anything above complex.
pub fn classify(d: Delta, t1: u8, t2: u8) -> Result<RegionClass> {
    if t1 > t2 {
        return Err(Error::InvalidThresholds { t1, t2 });
    }
    Ok(classify_unchecked(d, t1, t2))
}

#[inline]
pub(crate) fn classify_unchecked(d: Delta, t1: u8, t2: u8) -> RegionClass {
    if d.0 <= t1 {
        RegionClass::Smooth
    } else if d.0 <= t2 {
        RegionClass::Normal
    } else {
        RegionClass::Complex
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::{to_gray, ColorImage};
    use proptest::prelude::*;

    /// Direct two-pass variance over exact rationals.
    fn oracle(v: [i32; 5]) -> u8 {
        let n = 5.0f64;
        let mean = v.iter().map(|&x| x as f64).sum::<f64>() / n;
        let var = v.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>() / n;
        (var.floor() as i64).min(255) as u8
    }

    #[test]
    fn variance_examples() {
        assert_eq!(variance5([7; 5]), Delta(0));
        // mean 12, squared deviations 4+4+4+4+64 = 80, /5 = 16
        assert_eq!(oracle([10, 10, 10, 10, 20]), 16);
        assert_eq!(variance5([10, 10, 10, 10, 20]), Delta(16));
        // 15606 before the cap
        assert_eq!(variance5([0, 255, 0, 255, 0]), Delta(255));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(Delta(0), 5, 20).unwrap(), RegionClass::Smooth);
        assert_eq!(classify(Delta(10), 5, 20).unwrap(), RegionClass::Normal);
        assert_eq!(classify(Delta(25), 5, 20).unwrap(), RegionClass::Complex);
        assert_eq!(classify(Delta(5), 5, 20).unwrap(), RegionClass::Smooth);
        assert_eq!(classify(Delta(20), 5, 20).unwrap(), RegionClass::Normal);
        assert!(classify(Delta(0), 6, 5).is_err());
    }

    #[test]
    fn delta_region_check() {
        let img = ColorImage::from_fn(8, 8, |i, j| [(i * 10) as u8, (j * 10) as u8, 0]);
        let g = to_gray(&img);
        assert!(delta(&g, 1, 1).is_ok());
        assert!(matches!(delta(&g, 0, 1), Err(Error::OutOfRegion(0, 1))));
        assert!(matches!(delta(&g, 6, 1), Err(Error::OutOfRegion(6, 1))));
    }

    proptest! {
        #[test]
        fn variance_matches_oracle(v in proptest::array::uniform5(0i32..=255)) {
            prop_assert_eq!(variance5(v).0, oracle(v));
        }

        #[test]
        fn zero_only_when_nearly_flat(v in proptest::array::uniform5(0i32..=6)) {
            let (lo, hi) = (*v.iter().min().unwrap(), *v.iter().max().unwrap());
            if lo == hi {
                prop_assert_eq!(variance5(v).0, 0);
            }
            if variance5(v).0 == 0 {
                prop_assert!(hi - lo <= 3);
            }
        }

        #[test]
        fn threshold_monotone(d in 0u8..=255, t1 in 0u8..=255, t2 in 0u8..=255, up in 0u8..=255) {
            let (t1, t2) = (t1.min(t2), t1.max(t2));
            let t1b = t1.saturating_add(up).min(t2);
            if classify_unchecked(Delta(d), t1, t2) == RegionClass::Smooth {
                prop_assert_eq!(classify_unchecked(Delta(d), t1b, t2), RegionClass::Smooth);
            }
            let t2b = t2.saturating_add(up);
            if classify_unchecked(Delta(d), t1, t2) != RegionClass::Complex {
                prop_assert_ne!(classify_unchecked(Delta(d), t1, t2b), RegionClass::Complex);
            }
        }
    }
}
