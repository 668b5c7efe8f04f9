//! Distortion and invariance measures.

use crate::error::Result;
use crate::image::{to_gray, ColorImage};

/// Per-run quality summary.
#[derive(Debug, Clone, PartialEq)]
pub struct QualityReport {
    pub mse: f64,
    /// `f64::INFINITY` for identical images.
    pub psnr: f64,
    pub ued: Vec<f64>,
    pub gray_changed_pixels: usize,
    pub capacity_bits: usize,
}

impl QualityReport {
    pub fn new(cover: &ColorImage, marked: &ColorImage, units: &[crate::codec::UnitRecord], capacity_bits: usize) -> Result<Self> {
        let mse = mse(cover, marked)?;
        let ued = units
            .iter()
            .map(|u| {
                let (i, j) = u.pos;
                ued(
                    cover.pixel(i, j).map(|v| v as i32),
                    marked.pixel(i, j).map(|v| v as i32),
                    u.bits_in_r,
                )
            })
            .collect();
        Ok(Self {
            mse,
            psnr: psnr_from_mse(mse),
            ued,
            gray_changed_pixels: invariance_report(cover, marked)?.len(),
            capacity_bits,
        })
    }
}

/// Mean squared error over all `width * height * 3` samples.
pub fn mse(a: &ColorImage, b: &ColorImage) -> Result<f64> {
    a.check_same_dims(b)?;
    let sum: u64 = a
        .as_raw()
        .iter()
        .zip(b.as_raw())
        .map(|(&x, &y)| {
            let d = x as i64 - y as i64;
            (d * d) as u64
        })
        .sum();
    Ok(sum as f64 / a.as_raw().len() as f64)
}

pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (255.0f64 * 255.0 / mse).log10()
    }
}

pub fn psnr(a: &ColorImage, b: &ColorImage) -> Result<f64> {
    Ok(psnr_from_mse(mse(a, b)?))
}

/// Formats a PSNR for CSV and console output; infinity prints as `inf`.
pub fn format_psnr(db: f64) -> String {
    if db.is_infinite() {
        "inf".to_string()
    } else {
        format!("{db:.4}")
    }
}

/// Unit embedding distortion: squared error over R, G, B, per embedded
/// red bit when the unit carries two.
pub fn ued(cover: [i32; 3], marked: [i32; 3], bits_in_r: u8) -> f64 {
    let d: i64 = cover
        .iter()
        .zip(&marked)
        .map(|(&a, &b)| ((a - b) as i64).pow(2))
        .sum();
    if bits_in_r == 2 {
        d as f64 / 2.0
    } else {
        d as f64
    }
}

/// Pixels whose gray level differs between the two images, row-major.
pub fn invariance_report(cover: &ColorImage, marked: &ColorImage) -> Result<Vec<(usize, usize)>> {
    cover.check_same_dims(marked)?;
    let (ga, gb) = (to_gray(cover), to_gray(marked));
    let w = cover.width();
    Ok(ga
        .as_raw()
        .iter()
        .zip(gb.as_raw())
        .enumerate()
        .filter(|(_, (a, b))| a != b)
        .map(|(k, _)| (k / w, k % w))
        .collect())
}
