//! Comparison schemes sharing the driver, header and ECB machinery.
//!
//! - `Hou`: one bit per unit in red and the ECB in blue, both predicted by
//!   the quadratic-in-gray fit; no smooth/normal split.
//! - `Li`: the proposed classifier and first-level predictor, but smooth
//!   units expand twice around `p1` instead of re-predicting.

use std::fmt;
use std::str::FromStr;

use crate::bits::BitBuf;
use crate::codec::{self, expand_embed, expand_extract, EncodeReport, RedBits, RedEmbed, Thresholds};
use crate::error::Result;
use crate::image::ColorImage;
use crate::predict::PredictionPair;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SchemeId {
    Proposed,
    Hou,
    Li,
}

impl SchemeId {
    pub const ALL: [SchemeId; 3] = [SchemeId::Proposed, SchemeId::Hou, SchemeId::Li];

    pub fn name(&self) -> &'static str {
        match self {
            SchemeId::Proposed => "proposed",
            SchemeId::Hou => "hou",
            SchemeId::Li => "li",
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for SchemeId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "proposed" => Ok(SchemeId::Proposed),
            "hou" => Ok(SchemeId::Hou),
            "li" => Ok(SchemeId::Li),
            other => Err(format!("unknown method '{other}' (expected proposed, hou or li)")),
        }
    }
}

/// One Hou unit: the payload bit into red, the previous ECB into blue.
pub fn hou_embed_unit(r_orig: i32, b_orig: i32, r_pred: i32, b_pred: i32, sd: bool, ecb_in: bool) -> (i32, i32) {
    (expand_embed(r_orig, r_pred, sd), expand_embed(b_orig, b_pred, ecb_in))
}

/// Two expansions around the same first-level prediction.
pub fn li_embed_unit_r(p_orig: i32, pair: &PredictionPair, sd1: bool, sd2: bool) -> RedEmbed {
    let p_wm1 = expand_embed(p_orig, pair.p1, sd1);
    RedEmbed {
        marked: expand_embed(p_wm1, pair.p1, sd2),
        consumed: 2,
        p_wm1,
        p2: None,
    }
}

pub fn li_extract_unit_r(p_marked: i32, pair: &PredictionPair) -> (RedBits, i32) {
    let (sd2, p_wm1) = expand_extract(p_marked, pair.p1);
    let (sd1, p) = expand_extract(p_wm1, pair.p1);
    (RedBits { sd1, sd2: Some(sd2) }, p)
}

/// Thresholds to use for a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunParams {
    Fixed(Thresholds),
    /// Search the threshold grid for the lowest simulated distortion.
    Auto,
}

pub fn run_scheme(
    scheme: SchemeId,
    cover: &ColorImage,
    secret: &BitBuf,
    params: RunParams,
) -> Result<(ColorImage, EncodeReport)> {
    match params {
        RunParams::Fixed(th) => codec::encode_with(scheme, cover, secret, th),
        RunParams::Auto => codec::encode_auto(scheme, cover, secret),
    }
}

pub fn decode_scheme(scheme: SchemeId, marked: &ColorImage) -> Result<(ColorImage, BitBuf)> {
    codec::decode_with(scheme, marked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::adjust_green;
    use crate::metrics::ued;

    #[test]
    fn hou_worked_unit() {
        let (r, b) = hou_embed_unit(103, 96, 103, 98, true, true);
        assert_eq!((r, b), (104, 93));
        let g = adjust_green(92, r, b, 86).unwrap();
        assert_eq!(ued([103, 86, 96], [r, g, b], 1), 10.0);
    }

    #[test]
    fn hou_zero_bits_exact_prediction() {
        assert_eq!(hou_embed_unit(50, 60, 50, 60, false, false), (50, 60));
    }

    #[test]
    fn li_worked_unit() {
        let pair = PredictionPair::new(104, 102);
        let out = li_embed_unit_r(103, &pair, true, false);
        assert_eq!(out.marked, 105);
        assert_eq!(li_embed_unit_r(103, &pair, false, false).marked, 103);
    }

    #[test]
    fn li_round_trip_small_domain() {
        for p in 0..=255 {
            for a in (0..=255).step_by(15) {
                for b in (0..=255).step_by(15) {
                    let pair = PredictionPair::new(a, b);
                    for bits in 0..4 {
                        let (s1, s2) = (bits & 1 == 1, bits & 2 == 2);
                        let m = li_embed_unit_r(p, &pair, s1, s2).marked;
                        let (rb, back) = li_extract_unit_r(m, &pair);
                        assert_eq!((rb.sd1, rb.sd2, back), (s1, Some(s2), p));
                    }
                }
            }
        }
    }

    #[test]
    fn scheme_names() {
        for s in SchemeId::ALL {
            assert_eq!(s.name().parse::<SchemeId>().unwrap(), s);
        }
        assert!("gf".parse::<SchemeId>().is_err());
    }
}
