//! PNG ⇄ [`Image`] conversion shared by the server and the CLI.

use std::io::Cursor;

use image::{ImageFormat, ImageReader, RgbaImage};
use shaderlens_core::Image;

/// Largest accepted width or height.
pub const MAX_DIMENSION: u32 = 4096;

#[derive(Debug, thiserror::Error)]
pub enum DecodeError {
    #[error("invalid PNG: {0}")]
    Invalid(String),
    #[error("image {width}x{height} exceeds {MAX_DIMENSION}x{MAX_DIMENSION}")]
    TooLarge { width: u32, height: u32 },
}

/// Decodes a PNG into RGBA8, checking the size before allocating pixels.
pub fn decode_png(bytes: &[u8]) -> Result<Image, DecodeError> {
    let reader = ImageReader::with_format(Cursor::new(bytes), ImageFormat::Png);
    let (width, height) = reader.into_dimensions().map_err(|e| DecodeError::Invalid(e.to_string()))?;
    if width > MAX_DIMENSION || height > MAX_DIMENSION {
        return Err(DecodeError::TooLarge { width, height });
    }
    let decoded = image::load_from_memory_with_format(bytes, ImageFormat::Png)
        .map_err(|e| DecodeError::Invalid(e.to_string()))?
        .into_rgba8();
    let (w, h) = decoded.dimensions();
    Image::new(w, h, decoded.into_raw()).map_err(|e| DecodeError::Invalid(e.to_string()))
}

pub fn encode_png(img: &Image) -> Vec<u8> {
    let buf = RgbaImage::from_raw(img.width(), img.height(), img.data().to_vec()).expect("buffer matches dimensions");
    let mut out = Cursor::new(Vec::new());
    buf.write_to(&mut out, ImageFormat::Png).expect("in-memory PNG encoding");
    out.into_inner()
}
