use std::fs;
use std::io::Cursor;
use std::path::Path;

use image::{ImageFormat, RgbImage};
use monoaug_core::PixelImage;

use super::{KittiError, Result};

/// Decode PNG bytes to 8-bit RGB. Grayscale is expanded, alpha dropped and
/// 16-bit channels reduced.
pub fn decode_png(bytes: &[u8], path: &Path) -> Result<PixelImage> {
    let corrupt = |source| KittiError::CorruptImage {
        path: path.to_owned(),
        source,
    };
    let img = image::load_from_memory_with_format(bytes, ImageFormat::Png).map_err(corrupt)?;
    let rgb = img.to_rgb8();
    let (w, h) = rgb.dimensions();
    PixelImage::new(w as usize, h as usize, rgb.into_raw()).map_err(|e| {
        corrupt(image::ImageError::Parameter(
            image::error::ParameterError::from_kind(image::error::ParameterErrorKind::Generic(
                e.to_string(),
            )),
        ))
    })
}

pub fn encode_png(img: &PixelImage) -> Vec<u8> {
    let buf = RgbImage::from_raw(img.width() as u32, img.height() as u32, img.data().to_vec())
        .expect("buffer length matches dimensions");
    let mut out = Cursor::new(Vec::new());
    buf.write_to(&mut out, ImageFormat::Png)
        .expect("PNG encoding into memory does not fail");
    out.into_inner()
}

pub fn read_png(path: &Path) -> Result<PixelImage> {
    let bytes = fs::read(path).map_err(|e| KittiError::io(path, e))?;
    decode_png(&bytes, path)
}

pub fn write_png(img: &PixelImage, path: &Path) -> Result<()> {
    fs::write(path, encode_png(img)).map_err(|e| KittiError::Io {
        path: path.to_owned(),
        source: e,
    })
}
