//! Growable bit buffer used for payloads, headers and compressed maps.

use std::fmt;

/// An ordered sequence of bits. Packs MSB-first when converted to bytes.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct BitBuf {
    bits: Vec<bool>,
}

impl BitBuf {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        Self {
            bits: Vec::with_capacity(n),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn get(&self, idx: usize) -> Option<bool> {
        self.bits.get(idx).copied()
    }

    /// Appends the `width` low bits of `value`, most significant first.
    pub fn push_uint(&mut self, value: u64, width: usize) {
        debug_assert!(width == 64 || value >> width == 0);
        for k in (0..width).rev() {
            self.bits.push((value >> k) & 1 == 1);
        }
    }

    pub fn extend_from(&mut self, other: &BitBuf) {
        self.bits.extend_from_slice(&other.bits);
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.bits.iter().copied()
    }

    pub fn truncate(&mut self, len: usize) {
        self.bits.truncate(len);
    }

    pub fn split_off(&mut self, at: usize) -> BitBuf {
        BitBuf {
            bits: self.bits.split_off(at),
        }
    }

    /// Packs MSB-first; the final byte is zero-padded.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.bits.len().div_ceil(8)];
        for (k, &b) in self.bits.iter().enumerate() {
            if b {
                out[k / 8] |= 0x80 >> (k % 8);
            }
        }
        out
    }

    /// Inverse of [`to_bytes`](Self::to_bytes) for the first `len` bits.
    pub fn from_bytes(bytes: &[u8], len: usize) -> Option<BitBuf> {
        if len > bytes.len() * 8 {
            return None;
        }
        let bits = (0..len)
            .map(|k| bytes[k / 8] & (0x80 >> (k % 8)) != 0)
            .collect();
        Some(BitBuf { bits })
    }
}

impl From<Vec<bool>> for BitBuf {
    fn from(bits: Vec<bool>) -> Self {
        Self { bits }
    }
}

impl FromIterator<bool> for BitBuf {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self {
            bits: iter.into_iter().collect(),
        }
    }
}

impl fmt::Debug for BitBuf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitBuf({} bits: ", self.bits.len())?;
        for &b in self.bits.iter().take(64) {
            f.write_str(if b { "1" } else { "0" })?;
        }
        if self.bits.len() > 64 {
            f.write_str("...")?;
        }
        f.write_str(")")
    }
}

/// Sequential reader over a bit slice.
pub struct BitReader<'a> {
    bits: &'a [bool],
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bits: &'a [bool]) -> Self {
        Self { bits, pos: 0 }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn read_bit(&mut self) -> Option<bool> {
        let b = self.bits.get(self.pos).copied()?;
        self.pos += 1;
        Some(b)
    }

    pub fn read_uint(&mut self, width: usize) -> Option<u64> {
        let mut v = 0u64;
        for _ in 0..width {
            v = (v << 1) | self.read_bit()? as u64;
        }
        Some(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uint_fields_are_big_endian() {
        let mut b = BitBuf::new();
        b.push_uint(0b101, 3);
        b.push_uint(1, 4);
        assert_eq!(b.as_slice(), &[true, false, true, false, false, false, true]);
        let mut r = BitReader::new(b.as_slice());
        assert_eq!(r.read_uint(3), Some(5));
        assert_eq!(r.read_uint(4), Some(1));
        assert_eq!(r.read_bit(), None);
    }

    #[test]
    fn bytes_pack_msb_first() {
        let b: BitBuf = [true, false, false, false, false, false, false, true, true]
            .into_iter()
            .collect();
        assert_eq!(b.to_bytes(), vec![0x81, 0x80]);
        assert_eq!(BitBuf::from_bytes(&[0x81, 0x80], 9).unwrap(), b);
        assert!(BitBuf::from_bytes(&[0x81], 9).is_none());
    }
}
