//! Binary PPM (P6) and 8-bit RGB PNG.

use std::fs;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use super::ColorImage;
use crate::error::{Error, Result};

const PNG_MAGIC: &[u8] = b"\x89PNG\r\n\x1a\n";

/// Loads a P6 PPM or an 8-bit RGB PNG, detected from the file magic.
pub fn load_image(path: impl AsRef<Path>) -> Result<ColorImage> {
    let bytes = fs::read(path.as_ref())?;
    if bytes.starts_with(PNG_MAGIC) {
        read_png(&bytes[..])
    } else if bytes.first() == Some(&b'P') {
        read_ppm(&bytes)
    } else {
        Err(Error::UnsupportedFormat(path.as_ref().display().to_string()))
    }
}

/// Writes PNG when the extension is `.png`, binary PPM otherwise.
///
/// The file is written to a sibling temporary and renamed into place, so a
/// failed save never leaves a partial image behind.
pub fn save_image(img: &ColorImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let is_png = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("png"));
    let mut buf = Vec::new();
    if is_png {
        write_png(img, &mut buf)?;
    } else {
        write_ppm(img, &mut buf)?;
    }
    write_atomic(path, &buf)
}

/// Writes `bytes` to a sibling temporary, then renames it over `path`.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    fs::write(&tmp, bytes)?;
    if let Err(e) = fs::rename(&tmp, path) {
        let _ = fs::remove_file(&tmp);
        return Err(e.into());
    }
    Ok(())
}

fn skip_ws_and_comments(bytes: &[u8], mut pos: usize) -> usize {
    loop {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
        } else {
            return pos;
        }
    }
}

fn read_header_uint(bytes: &[u8], pos: &mut usize) -> Result<usize> {
    *pos = skip_ws_and_comments(bytes, *pos);
    let start = *pos;
    while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
        *pos += 1;
    }
    if start == *pos {
        return Err(Error::Truncated("PPM header".into()));
    }
    std::str::from_utf8(&bytes[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::UnsupportedFormat("PPM header value out of range".into()))
}

pub fn read_ppm(bytes: &[u8]) -> Result<ColorImage> {
    if bytes.len() < 2 {
        return Err(Error::Truncated("PPM magic".into()));
    }
    match &bytes[..2] {
        b"P6" => {}
        b"P5" | b"P2" | b"P1" | b"P4" => {
            return Err(Error::NotRgb("single-channel PNM file".into()));
        }
        _ => return Err(Error::UnsupportedFormat("only binary PPM (P6) is supported".into())),
    }
    let mut pos = 2;
    let width = read_header_uint(bytes, &mut pos)?;
    let height = read_header_uint(bytes, &mut pos)?;
    let maxval = read_header_uint(bytes, &mut pos)?;
    if maxval != 255 {
        return Err(Error::BitDepth(format!("PPM maxval {maxval}, expected 255")));
    }
    // exactly one whitespace byte separates the header from the raster
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(Error::Truncated("PPM header".into()));
    }
    pos += 1;
    let need = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(3))
        .ok_or_else(|| Error::UnsupportedFormat("PPM dimensions overflow".into()))?;
    if bytes.len() - pos < need {
        return Err(Error::Truncated(format!(
            "PPM raster has {} of {need} bytes",
            bytes.len() - pos
        )));
    }
    ColorImage::from_raw(width, height, bytes[pos..pos + need].to_vec())
}

pub fn write_ppm(img: &ColorImage, mut w: impl Write) -> Result<()> {
    write!(w, "P6\n{} {}\n255\n", img.width(), img.height())?;
    w.write_all(img.as_raw())?;
    Ok(())
}

pub fn read_png(r: impl Read) -> Result<ColorImage> {
    let mut decoder = png::Decoder::new(std::io::BufReader::new(std::io::Cursor::new({
        let mut buf = Vec::new();
        let mut r = r;
        r.read_to_end(&mut buf)?;
        buf
    })));
    decoder.set_transformations(png::Transformations::EXPAND);
    let mut reader = decoder.read_info().map_err(png_err)?;
    let mut buf = vec![0; reader.output_buffer_size().unwrap_or(0)];
    let info = reader.next_frame(&mut buf).map_err(png_err)?;
    if info.bit_depth != png::BitDepth::Eight {
        return Err(Error::BitDepth(format!("PNG bit depth {:?}", info.bit_depth)));
    }
    match info.color_type {
        png::ColorType::Rgb => {}
        png::ColorType::Grayscale | png::ColorType::GrayscaleAlpha => {
            return Err(Error::NotRgb("grayscale PNG".into()));
        }
        other => return Err(Error::NotRgb(format!("PNG color type {other:?}"))),
    }
    buf.truncate(info.buffer_size());
    let (w, h) = (info.width as usize, info.height as usize);
    // drop any row padding
    let stride = info.line_size;
    let data = if stride == w * 3 {
        buf
    } else {
        buf.chunks(stride).flat_map(|row| &row[..w * 3]).copied().collect()
    };
    ColorImage::from_raw(w, h, data)
}

fn png_err(e: png::DecodingError) -> Error {
    match e {
        png::DecodingError::IoError(io) if io.kind() == std::io::ErrorKind::UnexpectedEof => {
            Error::Truncated(io.to_string())
        }
        png::DecodingError::IoError(io) => Error::Io(io),
        other => Error::UnsupportedFormat(other.to_string()),
    }
}

pub fn write_png(img: &ColorImage, w: impl Write) -> Result<()> {
    let mut enc = png::Encoder::new(BufWriter::new(w), img.width() as u32, img.height() as u32);
    enc.set_color(png::ColorType::Rgb);
    enc.set_depth(png::BitDepth::Eight);
    let mut writer = enc.write_header().map_err(png_enc_err)?;
    writer.write_image_data(img.as_raw()).map_err(png_enc_err)?;
    writer.finish().map_err(png_enc_err)?;
    Ok(())
}

fn png_enc_err(e: png::EncodingError) -> Error {
    match e {
        png::EncodingError::IoError(io) => Error::Io(io),
        other => Error::UnsupportedFormat(other.to_string()),
    }
}
