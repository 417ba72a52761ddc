use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::Rect2D;
use crate::label::ObjectLabel;

/// Binary per-pixel raster marking the union of a set of 2D boxes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BoxMask {
    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    /// Union of the pixel footprints of `rects`.
    pub fn from_rects<'a, I>(rects: I, width: usize, height: usize) -> Self
    where
        I: IntoIterator<Item = &'a Rect2D>,
    {
        let mut mask = Self::empty(width, height);
        for r in rects {
            mask.add_rect(r);
        }
        mask
    }

    /// Set every pixel in `[floor(left), ceil(right)) x [floor(top), ceil(bottom))`.
    pub fn add_rect(&mut self, r: &Rect2D) {
        let (x0, y0, x1, y1) = r.pixel_span(self.width, self.height);
        for y in y0..y1 {
            let row = &mut self.bits[y * self.width..(y + 1) * self.width];
            row[x0..x1].iter_mut().for_each(|b| *b = true);
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
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    #[inline]
    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// Mask of all non-DontCare label boxes on a `width` x `height` raster.
pub fn build_box_mask(labels: &[ObjectLabel], width: usize, height: usize) -> BoxMask {
    BoxMask::from_rects(
        labels
            .iter()
            .filter(|l| !l.is_dont_care())
            .map(|l| &l.box2d),
        width,
        height,
    )
}
