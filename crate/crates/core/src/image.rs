use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Number of interleaved channels per pixel (RGB).
pub const CHANNELS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ImageError {
    ZeroDimension { width: usize, height: usize },
    LengthMismatch { expected: usize, actual: usize },
}

impl fmt::Display for ImageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ImageError::ZeroDimension { width, height } => {
                write!(f, "image dimensions must be positive, got {width}x{height}")
            }
            ImageError::LengthMismatch { expected, actual } => {
                write!(f, "pixel buffer holds {actual} values, expected {expected}")
            }
        }
    }
}

impl core::error::Error for ImageError {}

/// Row-major 8-bit RGB raster.
#[derive(Clone, PartialEq, Eq)]
pub struct PixelImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl fmt::Debug for PixelImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PixelImage")
            .field("width", &self.width)
            .field("height", &self.height)
            .finish_non_exhaustive()
    }
}

impl PixelImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::ZeroDimension { width, height });
        }
        let expected = width * height * CHANNELS;
        if data.len() != expected {
            return Err(ImageError::LengthMismatch {
                expected,
                actual: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Image with every pixel set to `rgb`.
    ///
    /// Panics on a zero dimension.
    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        let mut data = vec![0u8; width * height * CHANNELS];
        for px in data.chunks_exact_mut(CHANNELS) {
            px.copy_from_slice(&rgb);
        }
        Self {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    fn offset(&self, x: usize, y: usize) -> usize {
        debug_assert!(x < self.width && y < self.height);
        (y * self.width + x) * CHANNELS
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let o = self.offset(x, y);
        [self.data[o], self.data[o + 1], self.data[o + 2]]
    }

    #[inline]
    pub fn set_pixel(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let o = self.offset(x, y);
        self.data[o..o + CHANNELS].copy_from_slice(&rgb);
    }

    /// One row as an interleaved channel slice.
    #[inline]
    pub fn row(&self, y: usize) -> &[u8] {
        let stride = self.width * CHANNELS;
        &self.data[y * stride..(y + 1) * stride]
    }

    #[inline]
    pub fn row_mut(&mut self, y: usize) -> &mut [u8] {
        let stride = self.width * CHANNELS;
        &mut self.data[y * stride..(y + 1) * stride]
    }

    /// Crop and/or zero-pad at the bottom-right so the result is exactly
    /// `width` x `height`. The top-left origin never moves.
    #[must_use]
    pub fn conform(&self, width: usize, height: usize) -> PixelImage {
        if (width, height) == self.dimensions() {
            return self.clone();
        }
        let mut out = PixelImage::filled(width, height, [0, 0, 0]);
        let copy_w = width.min(self.width) * CHANNELS;
        for y in 0..height.min(self.height) {
            out.row_mut(y)[..copy_w].copy_from_slice(&self.row(y)[..copy_w]);
        }
        out
    }

    /// Fill the half-open pixel rectangle `[x0, x1) x [y0, y1)`, clipped to
    /// the image.
    pub fn fill_rect(&mut self, x0: usize, y0: usize, x1: usize, y1: usize, rgb: [u8; 3]) {
        let x1 = x1.min(self.width);
        let y1 = y1.min(self.height);
        for y in y0.min(y1)..y1 {
            let row = self.row_mut(y);
            for px in row[x0.min(x1) * CHANNELS..x1 * CHANNELS].chunks_exact_mut(CHANNELS) {
                px.copy_from_slice(&rgb);
            }
        }
    }
}

/// Round half away from zero, then clamp into the 8-bit channel range.
#[inline]
pub fn round_clamp(v: f64) -> u8 {
    if v.is_nan() {
        return 0;
    }
    let r = libm::round(v);
    if r <= 0.0 {
        0
    } else if r >= 255.0 {
        255
    } else {
        r as u8
    }
}

/// Add a signed offset to a channel value with saturation.
#[inline]
pub fn offset_clamp(v: u8, delta: i32) -> u8 {
    (i32::from(v) + delta).clamp(0, 255) as u8
}
