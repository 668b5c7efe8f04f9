//! Location map and its order-0 adaptive binary arithmetic coder.
//!
//! The coder is the classic integer renormalizing design with 32-bit
//! `low`/`high` registers and pending-bit carry handling. Both symbol
//! counts start at 1 and grow by one per coded bit, so the code length of a
//! map depends only on its length and number of ones. Output is a raw bit
//! stream with no byte alignment; the decoder treats bits past the end as
//! zeros and rejects streams that run out by more than a register's width.

use crate::bits::BitBuf;
use crate::error::{Error, Result};

const TOP: u64 = (1 << 32) - 1;
const FIRST_QTR: u64 = 1 << 30;
const HALF: u64 = 1 << 31;
const THIRD_QTR: u64 = 3 << 30;
/// Counts are halved before their sum could starve a symbol of range.
const MAX_TOTAL: u32 = 1 << 29;

/// One flag per candidate unit; `true` marks a unit skipped for
/// overflow/underflow risk.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LocationMap {
    flags: Vec<bool>,
}

impl LocationMap {
    pub fn new(flags: Vec<bool>) -> Self {
        Self { flags }
    }

    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }

    pub fn get(&self, k: usize) -> bool {
        self.flags[k]
    }

    pub fn count_ones(&self) -> usize {
        self.flags.iter().filter(|&&b| b).count()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.flags
    }
}

#[derive(Clone, Copy)]
struct Model {
    c0: u32,
    c1: u32,
}

impl Model {
    fn new() -> Self {
        Self { c0: 1, c1: 1 }
    }

    #[inline]
    fn split(&self, low: u64, high: u64) -> u64 {
        let range = high - low + 1;
        range * self.c0 as u64 / (self.c0 + self.c1) as u64
    }

    #[inline]
    fn update(&mut self, bit: bool) {
        if bit {
            self.c1 += 1;
        } else {
            self.c0 += 1;
        }
        if self.c0 + self.c1 > MAX_TOTAL {
            self.c0 = self.c0.div_ceil(2);
            self.c1 = self.c1.div_ceil(2);
        }
    }
}

struct Encoder {
    low: u64,
    high: u64,
    pending: usize,
    out: BitBuf,
}

impl Encoder {
    fn new() -> Self {
        Self {
            low: 0,
            high: TOP,
            pending: 0,
            out: BitBuf::new(),
        }
    }

    fn emit(&mut self, bit: bool) {
        self.out.push(bit);
        for _ in 0..self.pending {
            self.out.push(!bit);
        }
        self.pending = 0;
    }

    fn encode(&mut self, model: &Model, bit: bool) {
        let split = model.split(self.low, self.high);
        if bit {
            self.low += split;
        } else {
            self.high = self.low + split - 1;
        }
        loop {
            if self.high < HALF {
                self.emit(false);
            } else if self.low >= HALF {
                self.emit(true);
                self.low -= HALF;
                self.high -= HALF;
            } else if self.low >= FIRST_QTR && self.high < THIRD_QTR {
                self.pending += 1;
                self.low -= FIRST_QTR;
                self.high -= FIRST_QTR;
            } else {
                break;
            }
            self.low <<= 1;
            self.high = (self.high << 1) | 1;
        }
    }

    fn finish(mut self) -> BitBuf {
        // two bits select a quarter that lies inside [low, high]
        self.pending += 1;
        let bit = self.low >= FIRST_QTR;
        self.emit(bit);
        self.out
    }
}

pub fn compress(lm: &LocationMap) -> BitBuf {
    if lm.is_empty() {
        return BitBuf::new();
    }
    let mut model = Model::new();
    let mut enc = Encoder::new();
    for &bit in lm.as_slice() {
        enc.encode(&model, bit);
        model.update(bit);
    }
    enc.finish()
}

struct Decoder {
    pos: usize,
    padded: usize,
    low: u64,
    high: u64,
    value: u64,
}

impl Decoder {
    fn new(bits: &[bool]) -> Result<Self> {
        let mut d = Self {
            pos: 0,
            padded: 0,
            low: 0,
            high: TOP,
            value: 0,
        };
        for _ in 0..32 {
            d.value = (d.value << 1) | d.next_bit(bits)? as u64;
        }
        Ok(d)
    }

    fn next_bit(&mut self, bits: &[bool]) -> Result<bool> {
        if let Some(&b) = bits.get(self.pos) {
            self.pos += 1;
            Ok(b)
        } else {
            self.padded += 1;
            if self.padded > 32 {
                return Err(Error::CorruptStream("location map stream exhausted".into()));
            }
            Ok(false)
        }
    }

    fn decode(&mut self, bits: &[bool], model: &Model) -> Result<bool> {
        let split = model.split(self.low, self.high);
        let bit = self.value >= self.low + split;
        if bit {
            self.low += split;
        } else {
            self.high = self.low + split - 1;
        }
        loop {
            if self.high < HALF {
            } else if self.low >= HALF {
                self.low -= HALF;
                self.high -= HALF;
                self.value -= HALF;
            } else if self.low >= FIRST_QTR && self.high < THIRD_QTR {
                self.low -= FIRST_QTR;
                self.high -= FIRST_QTR;
                self.value -= FIRST_QTR;
            } else {
                break;
            }
            self.low <<= 1;
            self.high = (self.high << 1) | 1;
            self.value = (self.value << 1) | self.next_bit(bits)? as u64;
        }
        Ok(bit)
    }
}

/// Decodes an `n`-flag map from a stream produced by [`compress`].
pub fn decompress(bits: &BitBuf, n: usize) -> Result<LocationMap> {
    if n == 0 {
        return Ok(LocationMap::default());
    }
    let mut model = Model::new();
    let bits = bits.as_slice();
    let mut dec = Decoder::new(bits)?;
    let mut flags = Vec::with_capacity(n);
    for _ in 0..n {
        let bit = dec.decode(bits, &model)?;
        model.update(bit);
        flags.push(bit);
    }
    Ok(LocationMap::new(flags))
}

/// Decodes flags one at a time, for callers that learn the map length
/// only while reading it. The stream is not touched until the first flag
/// is requested, so an empty stream is valid as long as it is never read.
pub struct FlagReader {
    bits: BitBuf,
    model: Model,
    dec: Option<Decoder>,
}

impl FlagReader {
    pub fn new(bits: BitBuf) -> Self {
        Self {
            bits,
            model: Model::new(),
            dec: None,
        }
    }

    pub fn next_flag(&mut self) -> Result<bool> {
        let bits = self.bits.as_slice();
        let dec = match &mut self.dec {
            Some(d) => d,
            slot => slot.insert(Decoder::new(bits)?),
        };
        let bit = dec.decode(bits, &self.model)?;
        self.model.update(bit);
        Ok(bit)
    }
}
