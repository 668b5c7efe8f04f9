//! Green-channel balancing and the error-correcting bit (ECB).
//!
//! For fixed red and blue samples at most two green values share one gray
//! level, because the green weight is 0.587 > 0.5. The ECB is the index of
//! the original green sample among those candidates.

use crate::error::{Error, Result};
use crate::image::{WEIGHT_B, WEIGHT_G, WEIGHT_R};

/// Inclusive range of green values in `[0, 255]` with
/// `round(0.299 r + 0.587 g + 0.114 b) == gr`; `lo > hi` when empty.
#[inline]
pub fn green_candidates(gr: i32, r: i32, b: i32) -> (i32, i32) {
    // 1000 gr - 500 <= 299 r + 587 g + 114 b <= 1000 gr + 499
    let base = WEIGHT_R * r + WEIGHT_B * b;
    let lo_num = 1000 * gr - 500 - base;
    let hi_num = 1000 * gr + 499 - base;
    let lo = -((-lo_num).div_euclid(WEIGHT_G)); // ceil
    let hi = hi_num.div_euclid(WEIGHT_G);
    (lo.max(0), hi.min(255))
}

/// The green value that restores gray `gr_target` next to the marked red and
/// blue samples, nearest to `g_orig` (ties to the smaller). `None` when no
/// in-range green value works.
#[inline]
pub fn adjust_green(gr_target: i32, r_marked: i32, b_marked: i32, g_orig: i32) -> Option<i32> {
    let (lo, hi) = green_candidates(gr_target, r_marked, b_marked);
    if lo > hi {
        None
    } else {
        Some(g_orig.clamp(lo, hi))
    }
}

#[inline]
pub fn compute_ecb(gr: i32, r_orig: i32, b_orig: i32, g_orig: i32) -> Result<bool> {
    let (lo, hi) = green_candidates(gr, r_orig, b_orig);
    if g_orig < lo || g_orig > hi || hi - lo > 1 {
        return Err(Error::CorruptStream(format!(
            "green {g_orig} not among candidates [{lo}, {hi}] for gray {gr}"
        )));
    }
    Ok(g_orig > lo)
}

#[inline]
pub fn recover_green(gr: i32, r_orig: i32, b_orig: i32, ecb: bool) -> Result<i32> {
    let (lo, hi) = green_candidates(gr, r_orig, b_orig);
    let g = lo + ecb as i32;
    if g > hi {
        return Err(Error::CorruptStream(format!(
            "ECB {} has no candidate in [{lo}, {hi}] for gray {gr}",
            ecb as u8
        )));
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::gray_of;

    fn brute(gr: i32, r: i32, b: i32) -> Vec<i32> {
        (0..=255).filter(|&g| gray_of(r, g, b) == gr).collect()
    }

    #[test]
    fn worked_unit() {
        assert_eq!(brute(92, 103, 96), vec![85, 86]);
        assert_eq!(green_candidates(92, 103, 96), (85, 86));
        assert!(compute_ecb(92, 103, 96, 86).unwrap());
        assert_eq!(recover_green(92, 103, 96, true).unwrap(), 86);
        assert_eq!(recover_green(92, 103, 96, false).unwrap(), 85);
        assert_eq!(adjust_green(92, 104, 93, 86), Some(86));
        assert_eq!(adjust_green(92, 103, 96, 86), Some(86));
        assert_eq!(adjust_green(92, 105, 93, 86), Some(86));
    }

    #[test]
    fn infeasible_green() {
        assert!(brute(0, 255, 255).is_empty());
        assert_eq!(adjust_green(0, 255, 255, 0), None);
    }

    #[test]
    fn singleton_ecb() {
        // find a singleton candidate set and check ECB 0 / reject ECB 1
        let (gr, r, b) = (0..=255)
            .flat_map(|r| (0..=255).map(move |b| (r, b)))
            .map(|(r, b)| (gray_of(r, 100, b), r, b))
            .find(|&(gr, r, b)| brute(gr, r, b).len() == 1)
            .unwrap();
        let g = brute(gr, r, b)[0];
        assert!(!compute_ecb(gr, r, b, g).unwrap());
        assert!(recover_green(gr, r, b, true).is_err());
    }

    #[test]
    fn candidates_match_brute_force() {
        for r in (0..=255).step_by(5) {
            for b in (0..=255).step_by(3) {
                for gr in (0..=255).step_by(11) {
                    let want = brute(gr, r, b);
                    let (lo, hi) = green_candidates(gr, r, b);
                    let got: Vec<i32> = (lo..=hi).collect();
                    assert_eq!(got, want, "gr={gr} r={r} b={b}");
                }
            }
        }
    }

    #[test]
    fn adjust_green_minimizes_distance() {
        for r in (0..=255).step_by(17) {
            for b in (0..=255).step_by(13) {
                for gr in (0..=255).step_by(9) {
                    for g0 in (0..=255).step_by(31) {
                        let best = brute(gr, r, b)
                            .into_iter()
                            .min_by_key(|&g| ((g - g0).abs(), g));
                        assert_eq!(adjust_green(gr, r, b, g0), best);
                    }
                }
            }
        }
    }
}
