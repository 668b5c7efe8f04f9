//! Grayscale-invariant reversible data hiding for 8-bit RGB images.
//!
//! A secret bitstream is hidden in the red and blue channels by
//! prediction-error expansion while the green channel is re-balanced so
//! that `round(0.299 R + 0.587 G + 0.114 B)` of every pixel outside a small
//! row-0 header stays exactly what it was in the cover. The decoder gets
//! back both the payload and the bit-exact cover.
//!
//! The crate is organized bottom-up:
//!
//! - [`image`]: containers, the grayscale conversion, traversal geometry, PPM/PNG I/O
//! - [`predict`]: MED, AGSP, the two-level predictor and the polynomial predictor
//! - [`classify`]: local complexity and the smooth/normal/complex split
//! - [`locmap`]: the adaptive binary arithmetic coder for the location map
//! - [`codec`]: the encoder/decoder driver, header format and unit primitives
//! - [`baselines`]: the Hou and Li comparison schemes
//! - [`metrics`]: PSNR, per-unit distortion and invariance reporting
//! - [`payload`]: payload file format and the seeded bit generator

pub mod baselines;
pub mod bits;
pub mod classify;
pub mod codec;
pub mod error;
pub mod image;
pub mod locmap;
pub mod metrics;
pub mod payload;
pub mod predict;

pub use baselines::{run_scheme, SchemeId};
pub use bits::BitBuf;
pub use classify::{classify, Delta, RegionClass};
pub use codec::{decode, encode, encode_auto, EncodeReport, Header, Thresholds};
pub use error::{Error, Result};
pub use image::{load_image, save_image, to_gray, ColorImage, GrayImage, TraversalRegion};
pub use metrics::{psnr, ued, QualityReport};
