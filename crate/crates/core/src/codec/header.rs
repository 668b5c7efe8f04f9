//! The row-0 LSB header.
//!
//! Layout, big-endian fields packed into pixel LSBs of row 0 in R,G,B order
//! from column 0 onward:
//!
//! ```text
//! T1 (8) | T2 (8) | K_end (w) | L_clm (w) | ECB_last (1) | PAD (1) | L_seg (w) | SLM (L_clm) | zero fill
//! ```
//!
//! with `w = ceil(log2(width * height))`. `PAD` is set when the last
//! embedding unit carried one filler bit after the payload. `SLM` holds the
//! compressed flags of the final stretch of units; `L_seg` is the length of
//! the location-map segment those units carry (0 when there is none). The
//! header always spans [`Header::total_bits`] slots, so its size is known
//! before any bit is embedded.

use crate::bits::{BitBuf, BitReader};
use crate::error::{Error, Result};
use crate::image::{unit_index_bits, Channel, ColorImage};

const CHANNELS: [Channel; 3] = [Channel::R, Channel::G, Channel::B];

/// Upper bound on the inline map, in bits.
pub const MAX_INLINE_MAP: usize = 48;
/// Smallest inline map budget an image must allow.
const MIN_INLINE_MAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Header {
    pub t1: u8,
    pub t2: u8,
    pub k_end: usize,
    pub ecb_last: bool,
    pub pad: bool,
    pub seg_len: usize,
    /// Compressed flags of the last stretch; its length is the `L_clm` field.
    pub slm: BitBuf,
}

impl Header {
    /// Bits before the inline map.
    pub fn fixed_bits(width: usize, height: usize) -> usize {
        18 + 3 * unit_index_bits(width, height)
    }

    /// Room for the inline map: whatever of row 0 is left, at most
    /// [`MAX_INLINE_MAP`] bits.
    pub fn map_budget(width: usize, height: usize) -> usize {
        (3 * width)
            .saturating_sub(Self::fixed_bits(width, height))
            .min(MAX_INLINE_MAP)
    }

    /// Header size in bits, or an error when row 0 is too short.
    pub fn total_bits(width: usize, height: usize) -> Result<usize> {
        let budget = Self::map_budget(width, height);
        let fixed = Self::fixed_bits(width, height);
        if budget < MIN_INLINE_MAP {
            return Err(Error::HeaderTooLarge {
                pixels: Self::pixel_count(fixed + MIN_INLINE_MAP),
                width,
            });
        }
        Ok(fixed + budget)
    }

    /// Row-0 pixels whose LSBs hold `bits` header bits.
    pub fn pixel_count(bits: usize) -> usize {
        bits.div_ceil(3)
    }

    pub fn to_bits(&self, width: usize, height: usize) -> Result<BitBuf> {
        let total = Self::total_bits(width, height)?;
        let w = unit_index_bits(width, height);
        let limit = 1usize << w;
        if self.slm.len() > Self::map_budget(width, height) {
            return Err(Error::CorruptHeader(format!(
                "inline map of {} bits exceeds its {}-bit budget",
                self.slm.len(),
                Self::map_budget(width, height)
            )));
        }
        if self.k_end >= limit || self.seg_len >= limit {
            return Err(Error::CorruptHeader(format!("field wider than {w} bits")));
        }
        let mut b = BitBuf::with_capacity(total);
        b.push_uint(self.t1 as u64, 8);
        b.push_uint(self.t2 as u64, 8);
        b.push_uint(self.k_end as u64, w);
        b.push_uint(self.slm.len() as u64, w);
        b.push(self.ecb_last);
        b.push(self.pad);
        b.push_uint(self.seg_len as u64, w);
        b.extend_from(&self.slm);
        while b.len() < total {
            b.push(false);
        }
        Ok(b)
    }

    /// Overwrites the LSBs of the first `bits.len()` row-0 slots.
    pub fn write_lsbs(img: &mut ColorImage, bits: &BitBuf) -> Result<()> {
        let pixels = Self::pixel_count(bits.len());
        if pixels > img.width() {
            return Err(Error::HeaderTooLarge {
                pixels,
                width: img.width(),
            });
        }
        for (t, bit) in bits.iter().enumerate() {
            let (j, ch) = (t / 3, CHANNELS[t % 3]);
            let v = img.get(0, j, ch);
            img.set(0, j, ch, (v & !1) | bit as u8);
        }
        Ok(())
    }

    /// The first `n` row-0 LSBs in slot order.
    pub fn read_lsbs(img: &ColorImage, n: usize) -> Result<BitBuf> {
        if Self::pixel_count(n) > img.width() {
            return Err(Error::CorruptHeader(format!(
                "{n} header bits do not fit in a {}-pixel row",
                img.width()
            )));
        }
        Ok((0..n)
            .map(|t| img.get(0, t / 3, CHANNELS[t % 3]) & 1 == 1)
            .collect())
    }

    pub fn read(img: &ColorImage) -> Result<Header> {
        let (width, height) = (img.width(), img.height());
        let total = Self::total_bits(width, height).map_err(|_| Error::CorruptHeader("image too narrow".into()))?;
        let w = unit_index_bits(width, height);
        let bits = Self::read_lsbs(img, total)?;
        let mut r = BitReader::new(bits.as_slice());
        let mut field = |n: usize| r.read_uint(n).ok_or_else(|| Error::CorruptHeader("truncated".into()));
        let t1 = field(8)? as u8;
        let t2 = field(8)? as u8;
        let k_end = field(w)? as usize;
        let l_clm = field(w)? as usize;
        let ecb_last = field(1)? == 1;
        let pad = field(1)? == 1;
        let seg_len = field(w)? as usize;
        if t1 > t2 {
            return Err(Error::CorruptHeader(format!("thresholds t1={t1} > t2={t2}")));
        }
        if l_clm > Self::map_budget(width, height) {
            return Err(Error::CorruptHeader(format!("inline map length {l_clm} exceeds budget")));
        }
        let fixed = Self::fixed_bits(width, height);
        let slm = bits.as_slice()[fixed..fixed + l_clm].iter().copied().collect();
        Ok(Header {
            t1,
            t2,
            k_end,
            ecb_last,
            pad,
            seg_len,
            slm,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_at_512() {
        assert_eq!(Header::fixed_bits(512, 512), 72);
        assert_eq!(Header::map_budget(512, 512), 48);
        assert_eq!(Header::total_bits(512, 512).unwrap(), 120);
        assert_eq!(Header::pixel_count(120), 40);
    }

    #[test]
    fn narrow_images() {
        // 16x16: w = 8, fixed = 42, row 0 holds 48 bits
        assert_eq!(Header::map_budget(16, 16), 6);
        assert!(matches!(Header::total_bits(16, 16), Err(Error::HeaderTooLarge { .. })));
        assert_eq!(Header::total_bits(32, 32).unwrap(), 18 + 30 + 48);
    }

    #[test]
    fn write_read_round_trip() {
        let mut img = ColorImage::from_fn(64, 16, |i, j| [(i * 13 + j) as u8, (j * 7) as u8, 200]);
        let h = Header {
            t1: 3,
            t2: 40,
            k_end: 777,
            ecb_last: true,
            pad: false,
            seg_len: 321,
            slm: [true, false, true, true, false].into_iter().collect(),
        };
        let bits = h.to_bits(64, 16).unwrap();
        assert_eq!(bits.len(), Header::total_bits(64, 16).unwrap());
        let before = img.clone();
        Header::write_lsbs(&mut img, &bits).unwrap();
        assert_eq!(Header::read(&img).unwrap(), h);
        // only LSBs of the first ceil(bits/3) pixels of row 0 may change
        for i in 0..16 {
            for j in 0..64 {
                let (a, b) = (before.pixel(i, j), img.pixel(i, j));
                if i > 0 || j >= Header::pixel_count(bits.len()) {
                    assert_eq!(a, b);
                } else {
                    for c in 0..3 {
                        assert_eq!(a[c] & !1, b[c] & !1);
                    }
                }
            }
        }
    }

    #[test]
    fn field_order_is_big_endian() {
        let h = Header {
            t1: 0x81,
            t2: 0xff,
            k_end: 1,
            ecb_last: true,
            pad: true,
            seg_len: 2,
            slm: [true].into_iter().collect(),
        };
        let bits = h.to_bits(32, 32).unwrap();
        assert_eq!(unit_index_bits(32, 32), 10);
        let s: String = bits.iter().map(|b| if b { '1' } else { '0' }).collect();
        let head = format!("10000001{}{}{}11{}1", "11111111", "0000000001", "0000000001", "0000000010");
        assert_eq!(&s[..head.len()], head);
        assert!(s[head.len()..].chars().all(|c| c == '0'));
    }

    #[test]
    fn oversized_inline_map_rejected() {
        let h = Header {
            t1: 0,
            t2: 0,
            k_end: 0,
            ecb_last: false,
            pad: false,
            seg_len: 0,
            slm: vec![true; MAX_INLINE_MAP + 1].into(),
        };
        assert!(h.to_bits(512, 512).is_err());
    }

    #[test]
    fn too_wide_header_rejected() {
        let mut img = ColorImage::new(8, 8);
        let bits: BitBuf = vec![true; 25].into();
        assert!(matches!(
            Header::write_lsbs(&mut img, &bits),
            Err(Error::HeaderTooLarge { pixels: 9, width: 8 })
        ));
    }
}
