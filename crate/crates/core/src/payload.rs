//! Payload files and the seeded bit generator.
//!
//! A payload file is an 8-byte little-endian bit count followed by the bits
//! packed MSB-first, zero-padded to a whole byte.
//!
//! Random payloads come from xorshift64* (shifts 12, 25, 27; multiplier
//! `0x2545F4914F6CDD1D`), one bit per output taken from the top bit. A zero
//! seed is replaced by `0x9E3779B97F4A7C15`.

use std::fs;
use std::path::Path;

use crate::bits::BitBuf;
use crate::error::{Error, Result};

const MULTIPLIER: u64 = 0x2545_F491_4F6C_DD1D;
const ZERO_SEED: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone)]
pub struct XorShift64Star {
    state: u64,
}

impl XorShift64Star {
    pub fn new(seed: u64) -> Self {
        Self {
            state: if seed == 0 { ZERO_SEED } else { seed },
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(MULTIPLIER)
    }

    pub fn next_bit(&mut self) -> bool {
        self.next_u64() >> 63 == 1
    }
}

pub fn random_bits(n: usize, seed: u64) -> BitBuf {
    let mut rng = XorShift64Star::new(seed);
    (0..n).map(|_| rng.next_bit()).collect()
}

pub fn encode_payload(bits: &BitBuf) -> Vec<u8> {
    let mut out = (bits.len() as u64).to_le_bytes().to_vec();
    out.extend(bits.to_bytes());
    out
}

pub fn decode_payload(bytes: &[u8]) -> Result<BitBuf> {
    let Some((len, body)) = bytes.split_first_chunk::<8>() else {
        return Err(Error::Truncated("payload length prefix".into()));
    };
    let n = usize::try_from(u64::from_le_bytes(*len))
        .map_err(|_| Error::Truncated("payload length does not fit".into()))?;
    BitBuf::from_bytes(body, n)
        .ok_or_else(|| Error::Truncated(format!("payload of {n} bits has {} bytes", body.len())))
}

pub fn read_payload(path: impl AsRef<Path>) -> Result<BitBuf> {
    decode_payload(&fs::read(path)?)
}

pub fn write_payload(path: impl AsRef<Path>, bits: &BitBuf) -> Result<()> {
    crate::image::io::write_atomic(path.as_ref(), &encode_payload(bits))
}
