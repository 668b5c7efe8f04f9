//! Encoder and decoder.
//!
//! Units of the traversal region are visited in row-major order. Each
//! non-complex unit that survives the overflow check (location map flag 0)
//! is an embedding unit until the payload runs out:
//!
//! - red carries one or two payload bits,
//! - blue carries the ECB of the previous embedding unit (0 for the first),
//! - green is re-balanced so the unit's gray level is unchanged.
//!
//! The last unit's ECB, the thresholds, the end index and the compressed
//! location map go into the LSBs of the start of row 0; the LSBs they
//! displace lead the payload. Decoding walks the same units in reverse so
//! every south/east predictor context is already restored when needed.

mod green;
mod header;
mod select;
mod unit;

pub use green::{adjust_green, compute_ecb, green_candidates, recover_green};
pub use header::Header;
pub use select::{encode_auto, rank_thresholds, T2_GRID};
pub use unit::{embed_unit_r, expand_embed, expand_extract, extract_unit_r, RedBits, RedEmbed};

use crate::baselines::{li_embed_unit_r, li_extract_unit_r, SchemeId};
use crate::bits::BitBuf;
use crate::classify::{classify_unchecked, delta_unchecked, RegionClass};
use crate::error::{Error, Result};
use crate::image::{invariant_gray, to_gray, unit_index_bits, Channel, ColorImage, GrayImage, TraversalRegion};
use crate::locmap::{self, FlagReader, LocationMap};
use crate::metrics;
use crate::predict::{poly_predict_at, Context9, PredictionPair};

/// Complexity thresholds, `t1 <= t2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Thresholds {
    pub t1: u8,
    pub t2: u8,
}

impl Thresholds {
    pub fn new(t1: u8, t2: u8) -> Result<Self> {
        if t1 > t2 {
            return Err(Error::InvalidThresholds { t1, t2 });
        }
        Ok(Self { t1, t2 })
    }
}

/// How a unit is embedded, or `None` when it is left alone.
#[inline]
pub(crate) fn unit_mode(scheme: SchemeId, d: crate::classify::Delta, th: Thresholds) -> Option<RegionClass> {
    match scheme {
        SchemeId::Hou => (d.0 <= th.t2).then_some(RegionClass::Normal),
        _ => match classify_unchecked(d, th.t1, th.t2) {
            RegionClass::Complex => None,
            c => Some(c),
        },
    }
}

/// Channel predictions for one unit.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Predictions {
    Pair { r: PredictionPair, b: i32 },
    Poly { r: i32, b: i32 },
}

impl Predictions {
    #[inline]
    pub(crate) fn at(scheme: SchemeId, img: &ColorImage, gray: &GrayImage, i: usize, j: usize) -> Self {
        match scheme {
            SchemeId::Hou => Predictions::Poly {
                r: poly_predict_at(img, gray, i, j, Channel::R),
                b: poly_predict_at(img, gray, i, j, Channel::B),
            },
            _ => Predictions::Pair {
                r: PredictionPair::from_context(&Context9::gather(img, i, j, Channel::R)),
                b: PredictionPair::from_context(&Context9::gather(img, i, j, Channel::B)).p1,
            },
        }
    }

    #[inline]
    pub(crate) fn b(&self) -> i32 {
        match *self {
            Predictions::Pair { b, .. } | Predictions::Poly { b, .. } => b,
        }
    }
}

#[inline]
pub(crate) fn embed_r(
    scheme: SchemeId,
    mode: RegionClass,
    r: i32,
    preds: &Predictions,
    sd1: bool,
    sd2: bool,
) -> RedEmbed {
    match (scheme, preds) {
        (SchemeId::Proposed, Predictions::Pair { r: pair, .. }) => embed_unit_r(r, pair, mode, sd1, sd2),
        (SchemeId::Li, Predictions::Pair { r: pair, .. }) => {
            if mode == RegionClass::Smooth {
                li_embed_unit_r(r, pair, sd1, sd2)
            } else {
                embed_unit_r(r, pair, RegionClass::Normal, sd1, sd2)
            }
        }
        (_, Predictions::Poly { r: pred, .. }) => {
            let m = expand_embed(r, *pred, sd1);
            RedEmbed {
                marked: m,
                consumed: 1,
                p_wm1: m,
                p2: None,
            }
        }
        _ => unreachable!("scheme/prediction mismatch"),
    }
}

#[inline]
fn extract_r(scheme: SchemeId, mode: RegionClass, marked: i32, preds: &Predictions) -> (RedBits, i32) {
    match (scheme, preds) {
        (SchemeId::Proposed, Predictions::Pair { r: pair, .. }) => extract_unit_r(marked, pair, mode),
        (SchemeId::Li, Predictions::Pair { r: pair, .. }) => {
            if mode == RegionClass::Smooth {
                li_extract_unit_r(marked, pair)
            } else {
                extract_unit_r(marked, pair, RegionClass::Normal)
            }
        }
        (_, Predictions::Poly { r: pred, .. }) => {
            let (sd1, p) = expand_extract(marked, *pred);
            (RedBits { sd1, sd2: None }, p)
        }
        _ => unreachable!("scheme/prediction mismatch"),
    }
}

/// True when every payload/ECB bit combination keeps the unit's red and
/// blue samples in range and leaves a green value that restores its gray
/// level. Independent of the actual payload.
pub(crate) fn plan_overflow(
    scheme: SchemeId,
    mode: RegionClass,
    px: [u8; 3],
    gr: i32,
    preds: &Predictions,
) -> bool {
    let [r, g, b] = px.map(|v| v as i32);
    for sd1 in [false, true] {
        for sd2 in [false, true] {
            let rm = embed_r(scheme, mode, r, preds, sd1, sd2).marked;
            if !(0..=255).contains(&rm) {
                return false;
            }
            for ecb in [false, true] {
                let bm = expand_embed(b, preds.b(), ecb);
                if !(0..=255).contains(&bm) || adjust_green(gr, rm, bm, g).is_none() {
                    return false;
                }
            }
        }
    }
    true
}

/// Public form of the overflow check for a unit of the proposed scheme.
pub fn unit_is_safe(px: [u8; 3], gr: i32, r_pair: &PredictionPair, b_p1: i32, region: RegionClass) -> bool {
    plan_overflow(
        SchemeId::Proposed,
        region,
        px,
        gr,
        &Predictions::Pair { r: *r_pair, b: b_p1 },
    )
}

/// What happened at one embedding unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnitRecord {
    pub k: usize,
    pub pos: (usize, usize),
    pub region: RegionClass,
    pub bits_in_r: u8,
    pub ecb_in: bool,
    pub ecb_out: bool,
    /// For two-bit smooth units: the second-level prediction error and the
    /// error a repeated expansion with `p1` would have produced.
    pub pe2: Option<(i32, i32)>,
}

#[derive(Debug, Clone)]
pub struct EncodeReport {
    pub scheme: SchemeId,
    pub thresholds: Thresholds,
    /// Secret bits embedded.
    pub capacity_bits: usize,
    /// Secret plus displaced header LSBs.
    pub payload_bits: usize,
    pub k_end: usize,
    /// Inline location-map bits in the header.
    pub l_clm: usize,
    /// Location-map segments carried in the payload.
    pub map_segments: usize,
    /// Location-map bits in total, inline and carried.
    pub map_bits: usize,
    pub header_bits: usize,
    pub header_pixels: usize,
    pub lm_ones: usize,
    pub pad: bool,
    pub psnr: f64,
    pub mse: f64,
    pub gray_changed_pixels: usize,
    pub units: Vec<UnitRecord>,
}

impl EncodeReport {
    /// Two-bit smooth units whose second-level error exceeds the repeated-expansion error.
    pub fn second_level_violations(&self) -> usize {
        self.units
            .iter()
            .filter_map(|u| u.pe2)
            .filter(|&(p, li)| p.abs() > li.abs())
            .count()
    }
}

/// Embeds `secret` with the proposed scheme at fixed thresholds.
pub fn encode(cover: &ColorImage, secret: &BitBuf, t1: u8, t2: u8) -> Result<(ColorImage, EncodeReport)> {
    encode_with(SchemeId::Proposed, cover, secret, Thresholds::new(t1, t2)?)
}

/// Recovers `(cover, secret)` from an image marked by the proposed scheme.
pub fn decode(marked: &ColorImage) -> Result<(ColorImage, BitBuf)> {
    decode_with(SchemeId::Proposed, marked)
}

/// Marked red, blue and green of one unit, or `None` when a sample would
/// leave `[0, 255]` or no green value restores the gray level.
fn try_embed(
    scheme: SchemeId,
    mode: RegionClass,
    px: [u8; 3],
    gr: i32,
    preds: &Predictions,
    bits: (bool, bool),
    ecb_in: bool,
) -> Option<(RedEmbed, i32, i32)> {
    let [r, g, b] = px.map(|v| v as i32);
    let red = embed_r(scheme, mode, r, preds, bits.0, bits.1);
    let bm = expand_embed(b, preds.b(), ecb_in);
    if !(0..=255).contains(&red.marked) || !(0..=255).contains(&bm) {
        return None;
    }
    let gm = adjust_green(gr, red.marked, bm, g)?;
    Some((red, bm, gm))
}

enum NextBit {
    Bit(bool),
    /// The payload is exhausted and these inline flags close the run.
    Close(BitBuf),
}

/// The payload stream and the location map as it grows.
///
/// Flags are kept for every candidate unit visited. When the stream runs
/// dry and the flags since the last segment would not fit inline, a new
/// segment `L_prev (w) | compressed flags` is appended. Its `L_prev` prefix
/// goes in first; the flags part is compressed once the unit carrying the
/// first prefix bit is known, and covers every unit before that carrier.
struct PayloadStream {
    bits: BitBuf,
    flags: Vec<bool>,
    /// Index into `flags` of the first unit of the current stretch.
    stretch: usize,
    /// Open segment: stream index of its first bit, flag index of its first carrier.
    open: Option<(usize, Option<usize>)>,
    seg_len: usize,
    segments: usize,
    w: usize,
    budget: usize,
}

impl PayloadStream {
    fn compress(flags: &[bool]) -> BitBuf {
        locmap::compress(&LocationMap::new(flags.iter().rev().copied().collect()))
    }

    fn bit(&mut self, idx: usize, unit_carries: bool) -> NextBit {
        if let Some(b) = self.bits.get(idx) {
            return NextBit::Bit(b);
        }
        if let Some((_, cut)) = self.open {
            let cut = cut.expect("segment prefix spans several units");
            let map = Self::compress(&self.flags[self.stretch..cut]);
            self.seg_len = self.w + map.len();
            self.bits.extend_from(&map);
            self.stretch = cut;
            self.open = None;
            self.segments += 1;
            return NextBit::Bit(self.bits.get(idx).expect("segment is never empty"));
        }
        let inline = if unit_carries {
            let mut f = self.flags[self.stretch..].to_vec();
            f.push(false);
            Self::compress(&f)
        } else {
            let mut end = self.flags.len();
            while end > self.stretch && self.flags[end - 1] {
                end -= 1;
            }
            Self::compress(&self.flags[self.stretch..end])
        };
        if inline.len() <= self.budget {
            return NextBit::Close(inline);
        }
        self.open = Some((self.bits.len(), None));
        self.bits.push_uint(self.seg_len as u64, self.w);
        NextBit::Bit(self.bits.get(idx).expect("prefix just written"))
    }

    /// Records the unit that read `consumed` bits from `cursor`, or was skipped.
    fn commit(&mut self, cursor: usize, consumed: usize, skipped: bool) {
        if let Some((start, None)) = self.open {
            if !skipped && (cursor..cursor + consumed).contains(&start) {
                self.open = Some((start, Some(self.flags.len())));
            }
        }
        self.flags.push(skipped);
    }
}

/// Embeds `secret` with any scheme at fixed thresholds.
///
/// The payload stream starts as the displaced header LSBs followed by the
/// secret; location-map segments follow as needed. A unit is skipped, with
/// its flag set, when its actual bits would push a sample out of range. The decoder
/// meets each segment's carriers before the units the segment describes.
pub fn encode_with(
    scheme: SchemeId,
    cover: &ColorImage,
    secret: &BitBuf,
    th: Thresholds,
) -> Result<(ColorImage, EncodeReport)> {
    let region = TraversalRegion::of(cover)?;
    let (width, height) = (cover.width(), cover.height());
    let header_bits = Header::total_bits(width, height)?;
    let gray = to_gray(cover);
    let cgray = invariant_gray(cover);

    let mut bits = Header::read_lsbs(cover, header_bits)?;
    bits.extend_from(secret);
    let mut stream = PayloadStream {
        bits,
        flags: Vec::new(),
        stretch: 0,
        open: None,
        seg_len: 0,
        segments: 0,
        w: unit_index_bits(width, height),
        budget: Header::map_budget(width, height),
    };
    let mut marked = cover.clone();
    let mut cursor = 0usize;
    let mut ecb_in = false;
    let mut pad = false;
    let mut units: Vec<UnitRecord> = Vec::new();
    let mut tail: Option<BitBuf> = None;

    for (k, (i, j)) in region.iter().enumerate() {
        let Some(mode) = unit_mode(scheme, delta_unchecked(&cgray, i, j), th) else {
            continue;
        };
        let preds = Predictions::at(scheme, cover, &gray, i, j);
        let px = cover.pixel(i, j);
        let gr = gray.get(i, j) as i32;

        let sd1 = match stream.bit(cursor, false) {
            NextBit::Bit(b) => b,
            NextBit::Close(t) => {
                tail = Some(t);
                break;
            }
        };
        let mut closing = None;
        let sd2 = if embed_r(scheme, mode, px[0] as i32, &preds, sd1, false).consumed == 2 {
            match stream.bit(cursor + 1, true) {
                NextBit::Bit(b) => b,
                NextBit::Close(t) => {
                    closing = Some(t);
                    false
                }
            }
        } else {
            false
        };
        let Some((red, bm, gm)) = try_embed(scheme, mode, px, gr, &preds, (sd1, sd2), ecb_in) else {
            stream.commit(cursor, 0, true);
            continue;
        };
        let consumed = red.consumed - closing.is_some() as usize;
        stream.commit(cursor, consumed, false);
        cursor += consumed;

        let [r, g, b] = px.map(|v| v as i32);
        let ecb_out = compute_ecb(gr, r, b, g)?;
        marked.set_pixel(i, j, [red.marked as u8, gm as u8, bm as u8]);
        let pe2 = match (scheme, &preds, red.p2) {
            (SchemeId::Proposed, Predictions::Pair { r: pair, .. }, Some(p2)) => {
                Some((red.p_wm1 - p2, red.p_wm1 - pair.p1))
            }
            _ => None,
        };
        units.push(UnitRecord {
            k,
            pos: (i, j),
            region: mode,
            bits_in_r: red.consumed as u8,
            ecb_in,
            ecb_out,
            pe2,
        });
        ecb_in = ecb_out;
        if let Some(t) = closing {
            tail = Some(t);
            pad = true;
            break;
        }
    }
    if tail.is_none() && cursor == stream.bits.len() && stream.open.is_none() {
        if let NextBit::Close(t) = stream.bit(cursor, false) {
            tail = Some(t);
        }
    }
    let Some(tail) = tail else {
        return Err(Error::CapacityExceeded {
            needed: secret.len(),
            embedded: cursor.saturating_sub(header_bits).min(secret.len()),
        });
    };
    let k_end = units.last().expect("stream is never empty").k;

    let header = Header {
        t1: th.t1,
        t2: th.t2,
        k_end,
        ecb_last: ecb_in,
        pad,
        seg_len: stream.seg_len,
        slm: tail,
    };
    let hbits = header.to_bits(width, height)?;
    Header::write_lsbs(&mut marked, &hbits)?;

    let mse = metrics::mse(cover, &marked)?;
    let report = EncodeReport {
        scheme,
        thresholds: th,
        capacity_bits: secret.len(),
        payload_bits: stream.bits.len(),
        k_end,
        l_clm: header.slm.len(),
        map_segments: stream.segments,
        map_bits: stream.bits.len() - header_bits - secret.len() + header.slm.len(),
        header_bits,
        header_pixels: Header::pixel_count(header_bits),
        lm_ones: stream.flags.iter().filter(|&&f| f).count(),
        pad,
        psnr: metrics::psnr_from_mse(mse),
        mse,
        gray_changed_pixels: metrics::invariance_report(cover, &marked)?.len(),
        units,
    };
    Ok((marked, report))
}

/// Recovers `(cover, secret)` from an image marked by `scheme`.
pub fn decode_with(scheme: SchemeId, marked: &ColorImage) -> Result<(ColorImage, BitBuf)> {
    let region = TraversalRegion::of(marked)?;
    let (width, height) = (marked.width(), marked.height());
    let w = unit_index_bits(width, height);
    let header = Header::read(marked)?;
    let header_bits = Header::total_bits(width, height)?;
    let th = Thresholds {
        t1: header.t1,
        t2: header.t2,
    };
    if header.k_end >= region.len() {
        return Err(Error::CorruptHeader(format!(
            "end index {} outside {} units",
            header.k_end,
            region.len()
        )));
    }

    let gray = to_gray(marked);
    let cgray = invariant_gray(marked);
    let mut img = marked.clone();
    let mut flags = FlagReader::new(header.slm.clone());
    let mut need = header.seg_len;
    // reversed stream: rev[skip..] are real bits, rev[skip..skip + done] belong to finished segments
    let mut rev: Vec<bool> = Vec::new();
    let skip = header.pad as usize;
    let mut done = 0usize;
    let mut ecb_next = header.ecb_last;
    let mut first_k = header.k_end;

    for k in (0..=header.k_end).rev() {
        let (i, j) = region.position(k);
        let mode = unit_mode(scheme, delta_unchecked(&cgray, i, j), th);
        let Some(mode) = mode else {
            if k == header.k_end {
                return Err(Error::CorruptHeader(format!("unit {k} is not an embedding unit")));
            }
            continue;
        };
        if flags.next_flag()? {
            if k == header.k_end {
                return Err(Error::CorruptHeader(format!("unit {k} is not an embedding unit")));
            }
            continue;
        }
        let preds = Predictions::at(scheme, &img, &gray, i, j);
        let [rm, _, bm] = img.pixel(i, j).map(|v| v as i32);
        let gr = gray.get(i, j) as i32;

        let (ecb_prev, b) = expand_extract(bm, preds.b());
        let (red, r) = extract_r(scheme, mode, rm, &preds);
        if !(0..=255).contains(&r) || !(0..=255).contains(&b) {
            return Err(Error::CorruptStream(format!("unit {k} restores out of range")));
        }
        let g = recover_green(gr, r, b, ecb_next)?;
        img.set_pixel(i, j, [r as u8, g as u8, b as u8]);

        if let Some(sd2) = red.sd2 {
            rev.push(sd2);
        }
        rev.push(red.sd1);
        ecb_next = ecb_prev;
        first_k = k;

        if k == header.k_end && header.pad && (red.sd2.is_none() || rev.first() != Some(&false)) {
            return Err(Error::CorruptStream("missing padding bit".into()));
        }
        if need > 0 && rev.len() >= skip + done + need {
            let seg: BitBuf = rev[skip + done..skip + done + need].iter().rev().copied().collect();
            if seg.len() < w {
                return Err(Error::CorruptStream("location map segment too short".into()));
            }
            let mut rd = crate::bits::BitReader::new(seg.as_slice());
            let prev = rd.read_uint(w).expect("length checked") as usize;
            let mut map = seg;
            flags = FlagReader::new(map.split_off(w));
            done += need;
            need = prev;
        }
    }
    if need > 0 {
        return Err(Error::CorruptStream(format!("{need}-bit location map segment never found")));
    }
    if ecb_next {
        return Err(Error::EcbContradiction(first_k));
    }

    let mut payload: BitBuf = rev[(skip + done).min(rev.len())..].iter().rev().copied().collect();
    if payload.len() < header_bits {
        return Err(Error::CorruptStream(format!(
            "{} payload bits, header needs {header_bits}",
            payload.len()
        )));
    }
    let secret = payload.split_off(header_bits);
    Header::write_lsbs(&mut img, &payload)?;
    Ok((img, secret))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overflow_examples() {
        // predictions equal to the originals move samples by at most 2
        let gr = crate::image::gray_of(120, 100, 90);
        assert!(unit_is_safe([120, 100, 90], gr, &PredictionPair::new(120, 120), 90, RegionClass::Smooth));
        // r = 255 with p1 = 250: PE = 5 pushes red past 255
        let px = [255u8, 128, 128];
        let gr = crate::image::gray_of(255, 128, 128);
        assert!(!unit_is_safe(px, gr, &PredictionPair::new(250, 250), 128, RegionClass::Normal));
    }
}
