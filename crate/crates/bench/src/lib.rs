//! Fixtures shared by the criterion benches.

use std::path::PathBuf;

use graykeep::ColorImage;

/// A deterministic textured image: smooth gradients plus bounded hash noise.
pub fn synthetic(width: usize, height: usize, seed: u64) -> ColorImage {
    ColorImage::from_fn(width, height, |i, j| {
        let h = ((i as u64 * 0x9E37_79B9) ^ (j as u64 * 0x85EB_CA6B) ^ seed).wrapping_mul(0xC2B2_AE35);
        let n = ((h >> 29) % 9) as i32 - 4;
        let base = 64 + (i * 96 / height.max(1)) as i32 + (j * 64 / width.max(1)) as i32;
        [base + n + 20, base + n, base - n - 20].map(|v| v.clamp(0, 255) as u8)
    })
}

/// Loads `name` from `$GRAYKEEP_TESTDATA` or the workspace `testdata/`.
pub fn testdata_image(name: &str) -> Option<ColorImage> {
    let dir = std::env::var_os("GRAYKEEP_TESTDATA")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../testdata"));
    graykeep::load_image(dir.join(name)).ok()
}
