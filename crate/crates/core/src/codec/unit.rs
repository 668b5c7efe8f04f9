//! Per-sample expansion and the red-channel unit patterns.

use crate::classify::RegionClass;
use crate::predict::{second_level_predict, PredictionPair};

/// Prediction-error expansion: the marked error is `2*PE + sd` for
/// `PE >= 0` and `2*PE - sd` for `PE < 0`.
#[inline]
pub fn expand_embed(p_orig: i32, p_pred: i32, sd: bool) -> i32 {
    let pe = p_orig - p_pred;
    if pe >= 0 {
        p_orig + pe + sd as i32
    } else {
        p_orig + pe - sd as i32
    }
}

/// Inverse of [`expand_embed`]: returns `(sd, p_orig)`.
#[inline]
pub fn expand_extract(p_marked: i32, p_pred: i32) -> (bool, i32) {
    let e = p_marked - p_pred;
    if e >= 0 {
        let sd = e & 1;
        (sd == 1, p_pred + (e - sd) / 2)
    } else {
        let sd = (-e) & 1;
        (sd == 1, p_pred + (e + sd) / 2)
    }
}

/// Second-level expansion around `p2`.
///
/// On the lower side (`p2 == p_min`) the error is treated as non-positive
/// even when it is zero, so the marked value never re-enters the open
/// interval `(p_min, p_max)`; that interval is what tells the decoder a
/// unit carried a single bit.
#[inline]
fn second_embed(p_wm1: i32, p2: i32, lower: bool, sd2: bool) -> i32 {
    let pe = p_wm1 - p2;
    if lower {
        debug_assert!(pe <= 0);
        p_wm1 + pe - sd2 as i32
    } else {
        debug_assert!(pe >= 0);
        p_wm1 + pe + sd2 as i32
    }
}

#[inline]
fn second_extract(p_marked: i32, p2: i32, lower: bool) -> (bool, i32) {
    let e = p_marked - p2;
    if lower {
        let sd = (-e) & 1;
        (sd == 1, p2 + (e + sd) / 2)
    } else {
        let sd = e & 1;
        (sd == 1, p2 + (e - sd) / 2)
    }
}

/// Result of the two-level embed on one sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RedEmbed {
    pub marked: i32,
    pub consumed: usize,
    /// Value after the first level.
    pub p_wm1: i32,
    /// Second-level predictor, when a second bit went in.
    pub p2: Option<i32>,
}

/// Embeds into the red sample of a unit.
///
/// Normal units take one bit predicted by `p1`. Smooth units take `sd1`
/// the same way, then `sd2` against the second-level prediction unless the
/// once-marked value falls strictly inside `(p_min, p_max)`.
pub fn embed_unit_r(
    p_orig: i32,
    pair: &PredictionPair,
    region: RegionClass,
    sd1: bool,
    sd2: bool,
) -> RedEmbed {
    debug_assert!(region != RegionClass::Complex);
    let p_wm1 = expand_embed(p_orig, pair.p1, sd1);
    if region == RegionClass::Normal {
        return RedEmbed {
            marked: p_wm1,
            consumed: 1,
            p_wm1,
            p2: None,
        };
    }
    match second_level_predict(pair, p_wm1) {
        None => RedEmbed {
            marked: p_wm1,
            consumed: 1,
            p_wm1,
            p2: None,
        },
        Some(p2) => {
            let lower = p_wm1 <= pair.p_min;
            RedEmbed {
                marked: second_embed(p_wm1, p2, lower, sd2),
                consumed: 2,
                p_wm1,
                p2: Some(p2),
            }
        }
    }
}

/// Bits recovered from one red sample, in embedding order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RedBits {
    pub sd1: bool,
    pub sd2: Option<bool>,
}

impl RedBits {
    pub fn count(&self) -> usize {
        1 + self.sd2.is_some() as usize
    }
}

/// Exact inverse of [`embed_unit_r`]: returns the bits and the original sample.
pub fn extract_unit_r(p_marked: i32, pair: &PredictionPair, region: RegionClass) -> (RedBits, i32) {
    debug_assert!(region != RegionClass::Complex);
    if region == RegionClass::Normal || pair.strictly_inside(p_marked) {
        let (sd1, p) = expand_extract(p_marked, pair.p1);
        return (RedBits { sd1, sd2: None }, p);
    }
    let lower = p_marked <= pair.p_min;
    let p2 = if lower { pair.p_min } else { pair.p_max };
    let (sd2, p_wm1) = second_extract(p_marked, p2, lower);
    let (sd1, p) = expand_extract(p_wm1, pair.p1);
    (
        RedBits {
            sd1,
            sd2: Some(sd2),
        },
        p,
    )
}
