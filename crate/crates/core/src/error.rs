use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error("truncated image file: {0}")]
    Truncated(String),

    #[error("not RGB: {0}")]
    NotRgb(String),

    #[error("unsupported bit depth: {0}")]
    BitDepth(String),

    #[error("image dimensions mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),

    #[error("image too small: {width}x{height} (need at least 8x8)")]
    ImageTooSmall { width: usize, height: usize },

    #[error("invalid thresholds: t1={t1} > t2={t2}")]
    InvalidThresholds { t1: u8, t2: u8 },

    #[error("position ({0}, {1}) is outside the traversal region")]
    OutOfRegion(usize, usize),

    #[error("capacity exceeded: {needed} payload bits requested, {embedded} fit")]
    CapacityExceeded { needed: usize, embedded: usize },

    #[error("header needs {pixels} row-0 pixels but the image is {width} wide")]
    HeaderTooLarge { pixels: usize, width: usize },

    #[error("corrupt header: {0}")]
    CorruptHeader(String),

    #[error("corrupt stream: {0}")]
    CorruptStream(String),

    #[error("ECB contradiction at unit {0}")]
    EcbContradiction(usize),
}
